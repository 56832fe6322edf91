#pragma once

#include "resolute/ground.hpp"
#include "resolute/util.hpp"

#include <functional>
#include <optional>
#include <variant>

namespace resolute {

// Complete, constraint-closed truth assignment over the ground atoms of a
// description. Statics are embedded so axiom bodies evaluate uniformly.
struct State {
    Bitset values;

    bool holds(int atom) const { return values.test(atom); }
    bool holds(const GroundLit& l) const { return values.test(l.atom) == l.positive; }
    bool operator==(const State& o) const { return values == o.values; }
    std::pair<uint64_t, uint64_t> key() const { return values.hash128(); }
};

struct Inconsistent {
    int constraint = -1;  // ground axiom index, -1 for direct effect clashes
    std::string detail;
};
struct Inexecutable {
    int condition = -1;  // ground executability axiom index
};

using CompletionResult = std::variant<State, Inconsistent>;
using TransitionResult = std::variant<State, Inexecutable, Inconsistent>;

// Partial assignment over basic fluents (statics come from the grounded
// description). Used when building initial states.
struct PartialState {
    Bitset known;
    Bitset values;
    explicit PartialState(int atoms) : known(atoms), values(atoms) {}
    void assign(int atom, bool v) {
        known.set(atom, true);
        values.set(atom, v);
    }
};

// Closes a partial assignment: propagates basic-literal-head constraints,
// computes defined fluents as a least fixpoint, and checks every ground
// constraint. All basic fluents must end up determined.
CompletionResult complete_state(const PartialState& partial, const GroundedDescription& g);

// Recomputes defined fluents of `values` in place (least fixpoint under
// the defined-head constraints).
void recompute_defined(Bitset& values, const GroundedDescription& g);

bool body_holds(const std::vector<GroundLit>& body, const Bitset& values);

// Checks executability conditions only.
std::optional<Inexecutable> check_executable(const State& s, int action,
                                             const GroundedDescription& g);

// One-step transition: direct effects, constraint closure, inertia for the
// rest. Deterministic given deterministic causal laws.
TransitionResult successor(const State& s, int action, const GroundedDescription& g);

// Enumerates the legal states of small descriptions; throws
// ResourceLimitError when the basic-atom count exceeds `max_basic_atoms`.
std::vector<State> legal_states(const GroundedDescription& g, int max_basic_atoms = 24);

// Enumerates completions of a partial basic assignment into legal states,
// in lexicographic order of the undetermined atoms (false before true).
void enumerate_completions(const PartialState& partial, const GroundedDescription& g,
                           const std::function<bool(const State&)>& yield,
                           int max_basic_atoms = 24);

} // namespace resolute
