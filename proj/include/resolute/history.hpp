#pragma once

#include "resolute/plan.hpp"

#include <functional>
#include <optional>
#include <string>

namespace resolute {

struct ObsRec {
    int atom = -1;
    bool value = true;
    int step = 0;
};

// Attempted agent action along with the controller's verdict.
struct AttemptRec {
    int action = -1;
    int step = 0;
    enum class Verdict { Pending, Happened, NotHappened } verdict = Verdict::Pending;
};

// Mental events are kept for trace fidelity only; diagnosis ignores them.
struct MentalRec {
    enum class Kind { Start, Stop } kind = Kind::Start;
    int activity = 0;
    int step = 0;
};

struct History {
    std::vector<ObsRec> obs;
    std::vector<AttemptRec> attempts;
    std::vector<MentalRec> mental;
    int current_step = 0;

    void observe(int atom, bool value, int step) { obs.push_back({atom, value, step}); }
    void attempt(int action, int step) { attempts.push_back({action, step}); }
    void set_verdict(int action, int step, bool happened);

    // line-oriented log: obs/attempt/hpd/nothpd records plus mental hpd lines
    std::string serialize(const GroundedDescription& g) const;
};

// Minimal repair of the recorded history: exceptions to initial defaults
// and/or inserted exogenous actions.
struct Explanation {
    std::vector<int> default_exceptions;              // indices into g.defaults()
    std::vector<std::pair<int, int>> exo_insertions;  // (step, ground exo action)

    std::pair<int, int> cost() const {
        return {(int)exo_insertions.size(), (int)default_exceptions.size()};
    }
};

struct ModelOfHistory {
    std::vector<State> trajectory;  // states 0..current_step
    Explanation explanation;

    const State& final_state() const { return trajectory.back(); }
};
struct NoModel {
    std::string reason;
};
using ModelResult = std::variant<ModelOfHistory, NoModel>;

struct DiagnosisConfig {
    int max_exo = 2;
    int max_exceptions = 4;
    int completion_bound = 24;
    // optional previous explanation; re-validated before searching
    std::optional<Explanation> hint;
};

// Initial states consistent with step-0 observations and the prioritized
// defaults, in non-decreasing exception count. `yield` returns false to
// stop enumeration.
void initial_state_candidates(
    const GroundedDescription& g, const History& h, int max_exceptions,
    const std::function<bool(const State&, const std::vector<int>&)>& yield,
    int completion_bound = 24);

std::vector<State> initial_state_candidates(const GroundedDescription& g, const History& h,
                                            int max_exceptions = 4, std::size_t max_out = 64);

// Earliest step at which inserting `exo_action` is admissible: after the
// last positive observation of the fluent family it affects.
int min_insertion_step(const GroundedDescription& g, const History& h, int exo_action);

// Computes a model of the history minimizing (|exogenous|, |exceptions|)
// lexicographically, with deterministic tie-breaking.
ModelResult consistent_model(const GroundedDescription& g, const History& h,
                             const DiagnosisConfig& cfg = {});

bool goal_achieved(const ModelOfHistory& model, const Goal& goal);

} // namespace resolute
