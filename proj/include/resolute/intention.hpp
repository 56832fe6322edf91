#pragma once

#include "resolute/history.hpp"

#include <map>

namespace resolute {

// Named (goal, plan, length) triple; immutable once created.
struct Activity {
    int name = 0;
    Goal goal;
    std::vector<int> components;  // ground agent action ids

    int length() const { return (int)components.size(); }
};

// The agent's mental state: which activity and goal are active and how far
// execution has progressed. Derived notions (in-progress, next action) are
// functions of these fields.
struct MentalState {
    std::optional<int> active_activity;
    int current_action_index = 0;
    std::optional<Goal> active_goal;
    int next_activity_name = 1;
    std::map<int, Activity> activities;

    const Activity* active() const {
        if (!active_activity) return nullptr;
        auto it = activities.find(*active_activity);
        return it == activities.end() ? nullptr : &it->second;
    }
    bool in_progress() const {
        const Activity* a = active();
        return a && current_action_index < a->length();
    }
    std::optional<int> next_action() const {
        const Activity* a = active();
        if (!a || current_action_index >= a->length()) return std::nullopt;
        return a->components[current_action_index];
    }
};

struct IntendedAction {
    enum class Kind { Agent, Start, Stop, Done, Replan };
    Kind kind = Kind::Replan;
    int action = -1;         // for Agent
    int activity_name = -1;  // for Start/Stop
};

struct ActivityRejected {
    FailsAt failure;
};

// Creates a fresh activity from a plan that must verify against the
// model's final state.
std::variant<Activity, ActivityRejected> create_activity(MentalState& mental, const Goal& goal,
                                                         const std::vector<int>& plan,
                                                         const ModelOfHistory& model,
                                                         const GroundedDescription& g);

// True iff executing the remaining components from the model's final state
// reaches the activity goal.
bool projected_success(const Activity& activity, int current_index,
                       const ModelOfHistory& model, const GroundedDescription& g);

// Selects the next intentional step: Done when the goal already holds,
// Replan when nothing is active, the next component while the activity
// keeps its projected success, and Stop once it turns futile.
IntendedAction next_intended_action(const MentalState& mental, const ModelOfHistory& model,
                                    const GroundedDescription& g);

// Moves the action index after a verdict; NotHappened leaves it in place.
void advance(MentalState& mental, AttemptRec::Verdict verdict);

void start_activity(MentalState& mental, int name);
void stop_activity(MentalState& mental);

} // namespace resolute
