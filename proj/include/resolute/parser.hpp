#pragma once

#include "resolute/ast.hpp"

#include <string_view>
#include <variant>

namespace resolute {

using ParseResult = std::variant<SystemDescription, DomainError>;

// Parses and validates a domain description. `filename` is used only in
// diagnostics.
ParseResult parse_domain(std::string_view text, const std::string& filename = "<input>");

// Convenience wrapper that throws std::runtime_error with the rendered
// diagnostics on failure.
SystemDescription parse_domain_or_throw(std::string_view text,
                                        const std::string& filename = "<input>");

SystemDescription load_domain_file(const std::string& path);

} // namespace resolute
