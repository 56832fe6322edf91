#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "resolute/bench.hpp"
#include "resolute/parser.hpp"

#include <fstream>
#include <sstream>

using namespace resolute;

namespace {

std::string fixture_path(const std::string& name) {
    return std::string(RESOLUTE_DOMAIN_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_error(const ParseResult& r, const std::string& needle) {
    auto* err = std::get_if<DomainError>(&r);
    if (!err) return false;
    for (const auto& d : err->diagnostics)
        if (d.message.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("robot-assistant fixture parses with the expected signature") {
    auto desc = parse_domain_or_throw(slurp(fixture_path("ra.dom")), "ra.dom");
    const Signature& sig = desc.sig;

    int place = sig.sort_id("place");
    REQUIRE(place >= 0);
    CHECK(sig.members(place).size() == 4);

    for (const char* a : {"move", "pickup", "putdown", "unlock"}) {
        int id = sig.attr_id(a);
        REQUIRE(id >= 0);
        CHECK(sig.attr(id).kind == AttrKind::AgentAction);
    }
    for (const char* a : {"exo_move", "exo_lock"}) {
        int id = sig.attr_id(a);
        REQUIRE(id >= 0);
        CHECK(sig.attr(id).kind == AttrKind::ExoAction);
    }
    CHECK(sig.attr(sig.attr_id("loc")).kind == AttrKind::BasicFluent);
    CHECK(sig.attr(sig.attr_id("somewhere")).kind == AttrKind::DefinedFluent);
    CHECK(sig.attr(sig.attr_id("next_to")).kind == AttrKind::Static);

    CHECK(desc.defaults.size() == 2);
    CHECK(desc.defaults[0].priority < desc.defaults[1].priority);
}

TEST_CASE("print and reparse yields an equal description") {
    for (const char* name : {"ra.dom", "ra_fine.dom"}) {
        auto d1 = parse_domain_or_throw(slurp(fixture_path(name)), name);
        std::string printed = print_domain(d1);
        auto d2 = parse_domain_or_throw(printed, "printed");
        CHECK(d1 == d2);
        // and printing again is a fixed point
        CHECK(print_domain(d2) == printed);
    }
}

TEST_CASE("embedded sources match the shipped fixtures") {
    auto file_ra = parse_domain_or_throw(slurp(fixture_path("ra.dom")), "ra.dom");
    auto mem_ra = parse_domain_or_throw(ra_domain_source(), "ra");
    CHECK(file_ra == mem_ra);

    auto file_fine = parse_domain_or_throw(slurp(fixture_path("ra_fine.dom")), "ra_fine.dom");
    auto mem_fine = parse_domain_or_throw(ra_fine_domain_source(), "ra_fine");
    CHECK(file_fine == mem_fine);
}

TEST_CASE("empty sort bodies are rejected") {
    auto r = parse_domain("sorts:\n  place = {}\n", "t.dom");
    CHECK(has_error(r, "empty sort"));
}

TEST_CASE("undeclared symbols are reported with their name") {
    auto r = parse_domain(
        "sorts:\n"
        "  robot = {rob_1}\n"
        "fluents basic:\n"
        "  tired(robot)\n"
        "actions agent:\n"
        "  pickup(robot, cup)\n",
        "t.dom");
    CHECK(has_error(r, "cup"));
}

TEST_CASE("arity mismatches are rejected") {
    auto r = parse_domain(
        "sorts:\n"
        "  robot = {rob_1}\n"
        "  place = {a, b}\n"
        "statics:\n"
        "  next_to(place, place)\n"
        "fluents basic:\n"
        "  loc(robot, place)\n"
        "actions agent:\n"
        "  move(robot, place)\n"
        "axioms:\n"
        "  move(R, P) causes loc(R)\n",
        "t.dom");
    CHECK(has_error(r, "arity mismatch"));
}

TEST_CASE("duplicate declarations are rejected") {
    auto r = parse_domain("sorts:\n  place = {a}\n  place = {b}\n", "t.dom");
    CHECK(has_error(r, "duplicate"));
}

TEST_CASE("diagnostics carry file, line and column") {
    auto r = parse_domain("sorts:\n  place = {}\n", "some.dom");
    auto* err = std::get_if<DomainError>(&r);
    REQUIRE(err);
    REQUIRE(!err->diagnostics.empty());
    CHECK(err->diagnostics[0].str().rfind("some.dom:2:", 0) == 0);
}

TEST_CASE("multi-action executability conditions are flagged") {
    auto r = parse_domain(
        "sorts:\n"
        "  robot = {rob_1}\n"
        "  place = {a, b}\n"
        "fluents basic:\n"
        "  loc(robot, place)\n"
        "actions agent:\n"
        "  move(robot, place)\n"
        "  wave(robot)\n"
        "axioms:\n"
        "  impossible move(R, P), wave(R) if loc(R, P)\n",
        "t.dom");
    CHECK(has_error(r, "multi-action"));
}

TEST_CASE("variables with no consistent sort are rejected") {
    auto r = parse_domain(
        "sorts:\n"
        "  robot = {rob_1}\n"
        "  place = {a, b}\n"
        "fluents basic:\n"
        "  loc(robot, place)\n"
        "  open(place)\n"
        "axioms:\n"
        "  open(X) if loc(X, X)\n",
        "t.dom");
    CHECK(has_error(r, "no consistent sort"));
}
