#include "resolute/plan.hpp"

#include <unordered_map>

namespace resolute {

std::string Goal::to_string(const GroundedDescription& g) const {
    std::string s;
    for (std::size_t i = 0; i < literals.size(); ++i) {
        if (i) s += ", ";
        if (!literals[i].positive) s += '-';
        s += g.atom_name(literals[i].atom);
    }
    return s;
}

namespace {

struct Key {
    uint64_t h1, h2;
    bool operator==(const Key& o) const { return h1 == o.h1 && h2 == o.h2; }
};
struct KeyHash {
    std::size_t operator()(const Key& k) const { return k.h1; }
};

struct Searcher {
    const GroundedDescription& g;
    const Goal& goal;
    const SearchLimits& limits;
    const std::vector<int>& actions;

    std::size_t nodes = 0;
    std::size_t deadline_check = 0;
    bool out_of_budget = false;

    // per-depth memo: state -> largest remaining depth already explored
    std::unordered_map<Key, int, KeyHash> visited;
    std::vector<int> path;

    bool budget_ok() {
        if (++nodes > limits.max_nodes) { out_of_budget = true; return false; }
        if (limits.deadline && (++deadline_check & 0xff) == 0 &&
            std::chrono::steady_clock::now() > *limits.deadline) {
            out_of_budget = true;
            return false;
        }
        return true;
    }

    // depth-first, action ids ascending; first full path found is the
    // lexicographically least plan of this length. Called with remaining >= 1.
    bool dfs(const State& s, int remaining) {
        auto [h1, h2] = s.key();
        auto it = visited.find({h1, h2});
        if (it != visited.end() && it->second >= remaining) return false;
        visited[{h1, h2}] = remaining;

        for (int a : actions) {
            if (!budget_ok()) return false;
            auto res = successor(s, a, g);
            auto* next = std::get_if<State>(&res);
            if (!next) continue;
            path.push_back(a);
            if (remaining == 1) {
                if (goal.satisfied_by(*next)) return true;
            } else if (dfs(*next, remaining - 1)) {
                return true;
            }
            path.pop_back();
            if (out_of_budget) return false;
        }
        return false;
    }
};

} // namespace

PlanResult plan_minimal(const GroundedDescription& g, const State& init, const Goal& goal,
                        int max_horizon, const SearchLimits& limits) {
    if (goal.satisfied_by(init)) return Plan{};

    const std::vector<int>& actions =
        limits.action_filter.empty() ? g.agent_actions() : limits.action_filter;

    Searcher se{g, goal, limits, actions};
    for (int h = 1; h <= max_horizon; ++h) {
        se.visited.clear();
        se.path.clear();
        if (se.dfs(init, h)) return Plan{se.path};
        if (se.out_of_budget) return SearchBudgetExceeded{se.nodes};
    }
    return Unsat{max_horizon};
}

VerifyResult verify_plan(const GroundedDescription& g, const State& init,
                         const std::vector<int>& actions, const Goal& goal) {
    State cur = init;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        auto res = successor(cur, actions[i], g);
        if (std::holds_alternative<Inexecutable>(res))
            return FailsAt{(int)i, FailsAt::Reason::Inexecutable};
        if (std::holds_alternative<Inconsistent>(res))
            return FailsAt{(int)i, FailsAt::Reason::Inconsistent};
        cur = std::get<State>(res);
    }
    if (!goal.satisfied_by(cur))
        return FailsAt{(int)actions.size(), FailsAt::Reason::GoalUnsatisfied};
    return Reaches{};
}

} // namespace resolute
