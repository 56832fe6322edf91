#include "resolute/state.hpp"

namespace resolute {

bool body_holds(const std::vector<GroundLit>& body, const Bitset& values) {
    for (const auto& l : body)
        if (values.test(l.atom) != l.positive) return false;
    return true;
}

void recompute_defined(Bitset& values, const GroundedDescription& g) {
    for (int a : g.defined_atoms()) values.set(a, false);
    const auto& axioms = g.axioms();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int idx : g.defined_head_constraints()) {
            const GroundAxiom& ax = axioms[idx];
            if (!values.test(ax.head.atom) && body_holds(ax.body, values)) {
                values.set(ax.head.atom, true);
                changed = true;
            }
        }
    }
}

namespace {

// Closure driver for transitions and completion. Hard atoms (direct
// effects, caller-assigned values) can never change; everything else is
// defeasible: a basic-head constraint whose body holds flips the head
// atom away from its inertial value. A flip must remain supported in the
// final state, which rules out derivations from values that were
// themselves withdrawn.
struct Closure {
    const GroundedDescription& g;
    Bitset candidate;  // full assignment being built
    Bitset hard;       // immutable atoms
    Bitset flipped;    // soft-derived atoms
    std::vector<std::pair<int, int>> flip_origin;  // (atom, axiom that flipped it)
    std::optional<Inconsistent> conflict;

    Closure(const GroundedDescription& gd, Bitset base)
        : g(gd), candidate(std::move(base)), hard(gd.atom_count()),
          flipped(gd.atom_count()) {}

    bool set_hard(int atom, bool v, int origin_axiom) {
        if ((hard.test(atom) || flipped.test(atom)) && candidate.test(atom) != v) {
            conflict = Inconsistent{origin_axiom,
                                    "conflicting values for " + g.atom_name(atom)};
            return false;
        }
        hard.set(atom, true);
        candidate.set(atom, v);
        return true;
    }

    void run() {
        recompute_defined(candidate, g);
        const auto& axioms = g.axioms();
        bool changed = true;
        while (changed) {
            changed = false;
            for (int idx : g.basic_head_constraints()) {
                const GroundAxiom& ax = axioms[idx];
                if (candidate.test(ax.head.atom) == ax.head.positive) continue;
                if (hard.test(ax.head.atom) || flipped.test(ax.head.atom)) continue;
                if (!body_holds(ax.body, candidate)) continue;
                candidate.set(ax.head.atom, ax.head.positive);
                flipped.set(ax.head.atom, true);
                flip_origin.emplace_back(ax.head.atom, idx);
                recompute_defined(candidate, g);
                changed = true;
            }
        }
    }

    // final integrity pass: every constraint satisfied and every flip
    // still supported by some constraint body in the final state
    std::optional<Inconsistent> verify() {
        const auto& axioms = g.axioms();
        for (int idx : g.constraints()) {
            const GroundAxiom& ax = axioms[idx];
            if (body_holds(ax.body, candidate) &&
                candidate.test(ax.head.atom) != ax.head.positive)
                return Inconsistent{idx, "violated constraint on " + g.atom_name(ax.head.atom)};
        }
        for (int idx : g.never_constraints()) {
            if (body_holds(axioms[idx].body, candidate))
                return Inconsistent{idx, "never-condition holds"};
        }
        for (auto [atom, origin] : flip_origin) {
            // fast path: the axiom that produced the flip usually still fires
            if (body_holds(axioms[origin].body, candidate)) continue;
            bool supported = false;
            for (int idx : g.basic_head_constraints()) {
                const GroundAxiom& ax = axioms[idx];
                if (ax.head.atom == atom && ax.head.positive == candidate.test(atom) &&
                    body_holds(ax.body, candidate)) {
                    supported = true;
                    break;
                }
            }
            if (!supported)
                return Inconsistent{-1, "unsupported derivation of " + g.atom_name(atom)};
        }
        return std::nullopt;
    }
};

Bitset statics_base(const GroundedDescription& g) {
    Bitset b(g.atom_count());
    for (int a : g.static_atoms()) b.set(a, g.static_value(a));
    return b;
}

} // namespace

CompletionResult complete_state(const PartialState& partial, const GroundedDescription& g) {
    Bitset base = statics_base(g);
    for (int a : g.basic_atoms())
        if (partial.known.test(a)) base.set(a, partial.values.test(a));

    Closure cl(g, std::move(base));
    // everything assigned by the caller is pinned; unassigned basics start
    // false and may be raised by constraint propagation
    for (int a : g.basic_atoms())
        if (partial.known.test(a)) cl.hard.set(a, true);
    cl.run();

    if (auto bad = cl.verify()) return *bad;
    return State{std::move(cl.candidate)};
}

std::optional<Inexecutable> check_executable(const State& s, int action,
                                             const GroundedDescription& g) {
    for (int idx : g.exec_for(action))
        if (body_holds(g.axioms()[idx].body, s.values))
            return Inexecutable{idx};
    return std::nullopt;
}

TransitionResult successor(const State& s, int action, const GroundedDescription& g) {
    if (auto inex = check_executable(s, action, g)) return *inex;

    // inertial base: previous state values
    Closure cl(g, s.values);
    for (int idx : g.causal_for(action)) {
        const GroundAxiom& ax = g.axioms()[idx];
        if (!body_holds(ax.body, s.values)) continue;  // conditions read the source state
        if (!cl.set_hard(ax.head.atom, ax.head.positive, idx)) return *cl.conflict;
    }
    cl.run();
    if (auto bad = cl.verify()) return *bad;
    return State{std::move(cl.candidate)};
}

void enumerate_completions(const PartialState& partial, const GroundedDescription& g,
                           const std::function<bool(const State&)>& yield,
                           int max_basic_atoms) {
    std::vector<int> free_atoms;
    for (int a : g.basic_atoms())
        if (!partial.known.test(a)) free_atoms.push_back(a);
    if ((int)free_atoms.size() > max_basic_atoms)
        throw ResourceLimitError("state enumeration bound exceeded: " +
                                 std::to_string(free_atoms.size()) +
                                 " undetermined basic atoms");

    PartialState work = partial;
    // depth-first over undetermined atoms, false branch first
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == free_atoms.size()) {
            auto res = complete_state(work, g);
            if (auto* st = std::get_if<State>(&res))
                return yield(*st);
            return true;
        }
        for (bool v : {false, true}) {
            work.assign(free_atoms[i], v);
            if (!rec(i + 1)) return false;
        }
        work.known.set(free_atoms[i], false);
        return true;
    };
    rec(0);
}

std::vector<State> legal_states(const GroundedDescription& g, int max_basic_atoms) {
    std::vector<State> out;
    PartialState empty((int)g.atom_count());
    enumerate_completions(empty, g,
                          [&](const State& s) {
                              out.push_back(s);
                              return true;
                          },
                          max_basic_atoms);
    return out;
}

} // namespace resolute
