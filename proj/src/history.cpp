#include "resolute/history.hpp"

#include <algorithm>
#include <sstream>

namespace resolute {

void History::set_verdict(int action, int step, bool happened) {
    for (auto it = attempts.rbegin(); it != attempts.rend(); ++it) {
        if (it->action == action && it->step == step) {
            it->verdict = happened ? AttemptRec::Verdict::Happened
                                   : AttemptRec::Verdict::NotHappened;
            return;
        }
    }
}

std::string History::serialize(const GroundedDescription& g) const {
    std::ostringstream os;
    for (const auto& o : obs)
        os << "obs " << g.atom_name(o.atom) << " " << (o.value ? "true" : "false")
           << " " << o.step << "\n";
    for (const auto& a : attempts) {
        os << "attempt " << g.action_name(a.action) << " " << a.step << "\n";
        if (a.verdict == AttemptRec::Verdict::Happened)
            os << "hpd " << g.action_name(a.action) << " " << a.step << "\n";
        else if (a.verdict == AttemptRec::Verdict::NotHappened)
            os << "nothpd " << g.action_name(a.action) << " " << a.step << "\n";
    }
    for (const auto& m : mental)
        os << "hpd " << (m.kind == MentalRec::Kind::Start ? "start" : "stop")
           << "(activity_" << m.activity << ") " << m.step << "\n";
    return os.str();
}

namespace {

// Pin every atom derivable from known ones through basic-head constraints
// with fully known bodies. Keeps default application aligned with what
// reality checks would force anyway.
void propagate_known(PartialState& p, const GroundedDescription& g) {
    auto lit_known = [&](const GroundLit& l, bool& val) {
        if (g.atom_is_static(l.atom)) {
            val = g.static_value(l.atom) == l.positive;
            return true;
        }
        if (g.atom_is_basic(l.atom) && p.known.test(l.atom)) {
            val = p.values.test(l.atom) == l.positive;
            return true;
        }
        return false;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int idx : g.basic_head_constraints()) {
            const GroundAxiom& ax = g.axioms()[idx];
            if (!g.atom_is_basic(ax.head.atom)) continue;
            if (p.known.test(ax.head.atom)) continue;
            bool holds = true, v = false;
            for (const auto& l : ax.body) {
                if (!lit_known(l, v) || !v) { holds = false; break; }
            }
            if (holds) {
                p.assign(ax.head.atom, ax.head.positive);
                changed = true;
            }
        }
    }
}

bool default_body_holds(const GroundDefault& d, const PartialState& p,
                        const GroundedDescription& g) {
    for (const auto& l : d.body) {
        if (g.atom_is_static(l.atom)) {
            if (g.static_value(l.atom) != l.positive) return false;
        } else if (g.atom_is_basic(l.atom)) {
            if (!p.known.test(l.atom)) return false;  // undetermined: do not fire
            if (p.values.test(l.atom) != l.positive) return false;
        } else {
            return false;  // defined fluents are not available this early
        }
    }
    return true;
}

// Applies step-0 observations, then defaults in priority order with the
// given exception set.
PartialState apply_defaults(const GroundedDescription& g, const History& h,
                            const std::vector<int>& exceptions) {
    PartialState p(g.atom_count());
    for (const auto& o : h.obs)
        if (o.step == 0 && g.atom_is_basic(o.atom)) p.assign(o.atom, o.value);
    propagate_known(p, g);

    const auto& defaults = g.defaults();
    for (std::size_t i = 0; i < defaults.size(); ++i) {
        const GroundDefault& d = defaults[i];
        if (p.known.test(d.head.atom)) continue;
        if (!default_body_holds(d, p, g)) continue;
        bool excepted = std::binary_search(exceptions.begin(), exceptions.end(), (int)i);
        p.assign(d.head.atom, excepted ? !d.head.positive : d.head.positive);
        propagate_known(p, g);
    }
    return p;
}

template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    while (true) {
        if (!fn(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace

void initial_state_candidates(
    const GroundedDescription& g, const History& h, int max_exceptions,
    const std::function<bool(const State&, const std::vector<int>&)>& yield,
    int completion_bound) {
    int n_defaults = (int)g.defaults().size();
    max_exceptions = std::min(max_exceptions, n_defaults);
    for (int k = 0; k <= max_exceptions; ++k) {
        bool keep_going = true;
        for_each_subset(n_defaults, k, [&](const std::vector<int>& subset) {
            PartialState p = apply_defaults(g, h, subset);
            enumerate_completions(
                p, g,
                [&](const State& s) {
                    // step-0 observations of defined fluents check here
                    for (const auto& o : h.obs)
                        if (o.step == 0 && !g.atom_is_basic(o.atom) &&
                            !g.atom_is_static(o.atom) && s.holds(o.atom) != o.value)
                            return true;  // reject candidate, continue enumeration
                    keep_going = yield(s, subset);
                    return keep_going;
                },
                completion_bound);
            return keep_going;
        });
        if (!keep_going) return;
    }
}

std::vector<State> initial_state_candidates(const GroundedDescription& g, const History& h,
                                            int max_exceptions, std::size_t max_out) {
    std::vector<State> out;
    initial_state_candidates(
        g, h, max_exceptions,
        [&](const State& s, const std::vector<int>&) {
            out.push_back(s);
            return out.size() < max_out;
        });
    return out;
}

int min_insertion_step(const GroundedDescription& g, const History& h, int exo_action) {
    // an exogenous change cannot predate the last observation it would
    // contradict (the affected fluent seen with its old value)
    int lo = 0;
    for (int idx : g.causal_for(exo_action)) {
        const GroundAxiom& ax = g.axioms()[idx];
        int attr = g.atom_attr(ax.head.atom);
        auto head_args = g.atom_args(ax.head.atom);
        for (const auto& o : h.obs) {
            if (g.atom_attr(o.atom) != attr) continue;
            if (!head_args.empty()) {
                auto args = g.atom_args(o.atom);
                if (args.empty() || args[0] != head_args[0]) continue;
            }
            bool conflicts = (o.atom == ax.head.atom && o.value != ax.head.positive) ||
                             (o.atom != ax.head.atom && o.value && ax.head.positive);
            if (conflicts) lo = std::max(lo, o.step);
        }
    }
    return lo;
}

namespace {

struct Simulator {
    const GroundedDescription& g;
    const History& h;
    // agent actions that happened, indexed by step
    std::vector<std::vector<int>> happened;
    // observations grouped by step
    std::vector<std::vector<const ObsRec*>> obs_at;

    Simulator(const GroundedDescription& gd, const History& hist) : g(gd), h(hist) {
        happened.resize(h.current_step + 1);
        obs_at.resize(h.current_step + 1);
        for (const auto& a : h.attempts)
            if (a.verdict == AttemptRec::Verdict::Happened && a.step < h.current_step)
                happened[a.step].push_back(a.action);
        for (const auto& o : h.obs)
            if (o.step <= h.current_step) obs_at[o.step].push_back(&o);
    }

    bool obs_ok(const State& s, int step) const {
        for (const ObsRec* o : obs_at[step])
            if (s.holds(o->atom) != o->value) return false;
        return true;
    }

    // insertions must be sorted by (step, action)
    std::optional<std::vector<State>> run(const State& init,
                                          const std::vector<std::pair<int, int>>& insertions) const {
        std::vector<State> traj;
        traj.reserve(h.current_step + 1);
        traj.push_back(init);
        if (!obs_ok(traj[0], 0)) return std::nullopt;
        std::size_t ins = 0;
        for (int step = 0; step < h.current_step; ++step) {
            State cur = traj.back();
            // exogenous happenings precede the agent's action within a step
            while (ins < insertions.size() && insertions[ins].first == step) {
                auto res = successor(cur, insertions[ins].second, g);
                auto* next = std::get_if<State>(&res);
                if (!next) return std::nullopt;  // inserted action must be executable
                cur = std::move(*next);
                ++ins;
            }
            for (int action : happened[step]) {
                auto res = successor(cur, action, g);
                auto* next = std::get_if<State>(&res);
                if (!next) return std::nullopt;  // a happened action must apply
                cur = std::move(*next);
            }
            if (!obs_ok(cur, step + 1)) return std::nullopt;
            traj.push_back(std::move(cur));
        }
        return traj;
    }
};

} // namespace

ModelResult consistent_model(const GroundedDescription& g, const History& h,
                             const DiagnosisConfig& cfg) {
    Simulator sim(g, h);

    // candidate initial states grouped by exception count
    std::vector<std::vector<std::pair<State, std::vector<int>>>> by_exc(cfg.max_exceptions + 1);
    bool candidates_ready = false;
    auto candidates_with = [&](int k) -> const std::vector<std::pair<State, std::vector<int>>>& {
        if (!candidates_ready) {
            initial_state_candidates(
                g, h, cfg.max_exceptions,
                [&](const State& s, const std::vector<int>& exc) {
                    by_exc[exc.size()].emplace_back(s, exc);
                    return true;
                },
                cfg.completion_bound);
            candidates_ready = true;
        }
        return by_exc[k];
    };

    auto try_explanation = [&](const State& init, const std::vector<int>& exceptions,
                               const std::vector<std::pair<int, int>>& insertions)
        -> std::optional<ModelOfHistory> {
        auto traj = sim.run(init, insertions);
        if (!traj) return std::nullopt;
        ModelOfHistory m;
        m.trajectory = std::move(*traj);
        m.explanation.default_exceptions = exceptions;
        m.explanation.exo_insertions = insertions;
        return m;
    };

    // fast path: re-validate the previous explanation
    if (cfg.hint) {
        for (const auto& [init, exc] : candidates_with((int)cfg.hint->default_exceptions.size())) {
            if (exc != cfg.hint->default_exceptions) continue;
            if (auto m = try_explanation(init, exc, cfg.hint->exo_insertions)) return *m;
            break;
        }
    }

    // insertion slots ordered by (step, action id)
    std::vector<std::pair<int, int>> slots;
    for (int e : g.exo_actions()) {
        int lo = min_insertion_step(g, h, e);
        for (int s = lo; s < h.current_step; ++s) slots.push_back({s, e});
    }
    std::sort(slots.begin(), slots.end());

    for (int n_exo = 0; n_exo <= cfg.max_exo; ++n_exo) {
        for (int n_exc = 0; n_exc <= cfg.max_exceptions; ++n_exc) {
            for (const auto& [init, exc] : candidates_with(n_exc)) {
                std::optional<ModelOfHistory> found;
                for_each_subset((int)slots.size(), n_exo, [&](const std::vector<int>& pick) {
                    std::vector<std::pair<int, int>> ins;
                    ins.reserve(pick.size());
                    for (int i : pick) ins.push_back(slots[i]);
                    if (auto m = try_explanation(init, exc, ins)) {
                        found = std::move(*m);
                        return false;
                    }
                    return true;
                });
                if (found) return *found;
            }
        }
    }
    return NoModel{"no consistent model within diagnosis bounds (max_exo=" +
                   std::to_string(cfg.max_exo) + ", max_exceptions=" +
                   std::to_string(cfg.max_exceptions) + ")"};
}

bool goal_achieved(const ModelOfHistory& model, const Goal& goal) {
    return goal.satisfied_by(model.final_state());
}

} // namespace resolute
