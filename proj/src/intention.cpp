#include "resolute/intention.hpp"

namespace resolute {

std::variant<Activity, ActivityRejected> create_activity(MentalState& mental, const Goal& goal,
                                                         const std::vector<int>& plan,
                                                         const ModelOfHistory& model,
                                                         const GroundedDescription& g) {
    auto v = verify_plan(g, model.final_state(), plan, goal);
    if (auto* fail = std::get_if<FailsAt>(&v)) return ActivityRejected{*fail};
    Activity a;
    a.name = mental.next_activity_name++;
    a.goal = goal;
    a.components = plan;
    mental.activities[a.name] = a;
    return a;
}

bool projected_success(const Activity& activity, int current_index,
                       const ModelOfHistory& model, const GroundedDescription& g) {
    std::vector<int> remaining(activity.components.begin() + current_index,
                               activity.components.end());
    return plan_reaches(verify_plan(g, model.final_state(), remaining, activity.goal));
}

IntendedAction next_intended_action(const MentalState& mental, const ModelOfHistory& model,
                                    const GroundedDescription& g) {
    if (mental.active_goal && goal_achieved(model, *mental.active_goal))
        return {IntendedAction::Kind::Done};

    const Activity* act = mental.active();
    if (!act) return {IntendedAction::Kind::Replan};

    if (projected_success(*act, mental.current_action_index, model, g)) {
        if (mental.current_action_index >= act->length())
            return {IntendedAction::Kind::Done};
        // non-procrastination: an activity with projected success never idles
        IntendedAction ia{IntendedAction::Kind::Agent};
        ia.action = act->components[mental.current_action_index];
        return ia;
    }
    // futile: the remainder no longer reaches the goal
    IntendedAction ia{IntendedAction::Kind::Stop};
    ia.activity_name = act->name;
    return ia;
}

void advance(MentalState& mental, AttemptRec::Verdict verdict) {
    if (verdict == AttemptRec::Verdict::Happened) ++mental.current_action_index;
}

void start_activity(MentalState& mental, int name) {
    mental.active_activity = name;
    mental.current_action_index = 0;
}

void stop_activity(MentalState& mental) {
    mental.active_activity.reset();
    mental.current_action_index = 0;
}

} // namespace resolute
