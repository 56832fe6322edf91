#pragma once

#include "resolute/multires.hpp"
#include "resolute/state.hpp"

#include <random>

namespace resolute {

// Per-action-family reliability and duration. Families are attribute
// names; `star` variants fall back to their base family.
struct ActionModel {
    struct Entry {
        double success_prob = 1.0;
        double duration = 0.0;
    };
    std::map<std::string, Entry> families;
    double observation_accuracy = 1.0;
    Entry fallback{1.0, 1.0};

    const Entry& entry_for(const std::string& attr_name) const {
        auto it = families.find(attr_name);
        if (it != families.end()) return it->second;
        if (!attr_name.empty() && attr_name.back() == '*') {
            it = families.find(attr_name.substr(0, attr_name.size() - 1));
            if (it != families.end()) return it->second;
        }
        return fallback;
    }

    // move 15 units at 0.85, pickup/putdown 5 units at 0.95, unlock 5,
    // sensing accuracy 0.90
    static ActionModel robot_defaults();
    static ActionModel noise_free();
};

// Scripted exogenous event: fires once when its step arrives or its
// condition first holds.
struct ExoEntry {
    std::optional<int> at_step;
    std::vector<GroundLit> when;  // evaluated against ground truth
    std::string action;           // textual ground action, resolved per world
    bool fired = false;
};
struct ExoScript {
    std::vector<ExoEntry> entries;
};

struct ExecOutcome {
    enum class Verdict { Success, NoEffect } verdict = Verdict::Success;
    double elapsed = 0.0;
    // sensed fluent literals, textual form for resolution-independent use
    std::vector<std::pair<std::string, bool>> direct_obs;
};

// Ground-truth world at the execution resolution. Holds the real state,
// the simulated clock and a seeded generator; all randomness in a trial
// flows through it.
class WorldState {
public:
    WorldState(const GroundedDescription& g, State truth, ActionModel model, uint64_t seed,
               const DomainProfile& profile);

    const State& truth() const { return truth_; }
    double clock() const { return clock_; }
    const GroundedDescription& grounded() const { return *g_; }

    // Executes a ground agent action: succeeds with the family's
    // probability, always consumes its duration, and reports the fluents
    // testable from the robot's resulting location.
    ExecOutcome execute(int action);

    // Applies due script entries to the truth; invalid entries are skipped.
    // Returns the actions applied (for trace logs).
    std::vector<std::string> inject(ExoScript& script, int step);

    // Sensing without acting (used when an action fails or none is taken).
    std::vector<std::pair<std::string, bool>> observe();

    bool goal_holds(const Goal& goal) const { return goal.satisfied_by(truth_); }

    std::vector<std::string> warnings;

private:
    const GroundedDescription* g_;
    State truth_;
    ActionModel model_;
    std::mt19937_64 rng_;
    DomainProfile profile_;
    double clock_ = 0.0;

    int robot_location_atom() const;  // current loc atom of the robot, -1 if unknown
    bool testable(int atom, int robot_place_const) const;
};

} // namespace resolute
