#pragma once

#include "resolute/state.hpp"

#include <chrono>
#include <optional>

namespace resolute {

// Conjunction of ground fluent literals.
struct Goal {
    std::vector<GroundLit> literals;

    bool satisfied_by(const State& s) const {
        return body_holds(literals, s.values);
    }
    std::string to_string(const GroundedDescription& g) const;
};

struct Plan {
    std::vector<int> actions;  // ground action ids
    int horizon() const { return (int)actions.size(); }
};

struct Unsat {
    int max_horizon = 0;
};
struct SearchBudgetExceeded {
    std::size_t nodes = 0;
};

using PlanResult = std::variant<Plan, Unsat, SearchBudgetExceeded>;

struct SearchLimits {
    std::size_t max_nodes = 200'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    // restricts the planner to a subset of agent actions (sorted ids);
    // empty means all agent actions
    std::vector<int> action_filter;
};

// Minimal-length plan via iterative deepening with per-depth visited-state
// pruning. Tie-breaking is lexicographic by ground-action id at each depth,
// so results are deterministic.
PlanResult plan_minimal(const GroundedDescription& g, const State& init, const Goal& goal,
                        int max_horizon, const SearchLimits& limits = {});

struct Reaches {};
struct FailsAt {
    int step = 0;
    enum class Reason { Inexecutable, Inconsistent, GoalUnsatisfied } reason;
};
using VerifyResult = std::variant<Reaches, FailsAt>;

// Simulates the plan from `init`; Reaches iff no step fails and the final
// state satisfies the goal.
VerifyResult verify_plan(const GroundedDescription& g, const State& init,
                         const std::vector<int>& actions, const Goal& goal);

inline bool plan_reaches(const VerifyResult& r) {
    return std::holds_alternative<Reaches>(r);
}

} // namespace resolute
