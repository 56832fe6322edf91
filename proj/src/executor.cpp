#include "resolute/executor.hpp"

namespace resolute {

ActionModel ActionModel::robot_defaults() {
    ActionModel m;
    m.families["move"] = {0.85, 15.0};
    m.families["pickup"] = {0.95, 5.0};
    m.families["putdown"] = {0.95, 5.0};
    m.families["unlock"] = {0.95, 5.0};
    m.families["exo_move"] = {1.0, 0.0};
    m.families["exo_lock"] = {1.0, 0.0};
    m.observation_accuracy = 0.90;
    m.fallback = {1.0, 1.0};
    return m;
}

ActionModel ActionModel::noise_free() {
    ActionModel m = robot_defaults();
    for (auto& [name, e] : m.families) e.success_prob = 1.0;
    m.observation_accuracy = 1.0;
    return m;
}

WorldState::WorldState(const GroundedDescription& g, State truth, ActionModel model,
                       uint64_t seed, const DomainProfile& profile)
    : g_(&g), truth_(std::move(truth)), model_(std::move(model)), rng_(seed),
      profile_(profile) {}

int WorldState::robot_location_atom() const {
    int loc_attr = g_->sig().attr_id(profile_.loc_attr);
    int star_attr = g_->sig().attr_id(profile_.loc_attr + "*");
    int rob = g_->sig().constant_id(profile_.robot_constant);
    if (rob < 0) return -1;
    // prefer the fine attribute when the world runs at fine resolution
    for (int attr : {star_attr, loc_attr}) {
        if (attr < 0) continue;
        const auto& at = g_->sig().attr(attr);
        if (at.arg_sorts.size() != 2) continue;
        for (int place : g_->sig().members(at.arg_sorts[1])) {
            int atom = g_->atom_id(attr, {rob, place});
            if (atom >= 0 && truth_.holds(atom)) return atom;
        }
    }
    return -1;
}

bool WorldState::testable(int atom, int robot_place_const) const {
    const auto& at = g_->sig().attr(g_->atom_attr(atom));
    if (at.kind != AttrKind::BasicFluent && at.kind != AttrKind::DefinedFluent) return false;
    if (at.name.rfind("observed_", 0) == 0 || at.name.rfind("can_test_", 0) == 0)
        return false;  // knowledge bookkeeping is not a sensor target
    auto args = g_->atom_args(atom);
    int rob = g_->sig().constant_id(profile_.robot_constant);
    // the robot's own attributes are always testable
    if (at.name.rfind(profile_.in_hand_attr, 0) == 0 && !args.empty() && args[0] == rob)
        return true;
    // anything mentioning the robot's current place is in view
    for (int a : args)
        if (a == robot_place_const) return true;
    return false;
}

std::vector<std::pair<std::string, bool>> WorldState::observe() {
    std::vector<std::pair<std::string, bool>> out;
    int loc_atom = robot_location_atom();
    if (loc_atom < 0) return out;
    int place = g_->atom_args(loc_atom).back();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int atom = 0; atom < g_->atom_count(); ++atom) {
        if (!testable(atom, place)) continue;
        bool v = truth_.holds(atom);
        if (model_.observation_accuracy < 1.0 && unit(rng_) > model_.observation_accuracy)
            v = !v;  // sensor noise flips the reading
        out.emplace_back(g_->atom_name(atom), v);
    }
    return out;
}

ExecOutcome WorldState::execute(int action) {
    const auto& entry = model_.entry_for(g_->sig().attr(g_->action_attr(action)).name);
    ExecOutcome out;
    out.elapsed = entry.duration;
    clock_ += entry.duration;

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool attempt_succeeds = entry.success_prob >= 1.0 || unit(rng_) < entry.success_prob;

    auto res = successor(truth_, action, *g_);
    if (auto* next = std::get_if<State>(&res); next && attempt_succeeds) {
        truth_ = std::move(*next);
        out.verdict = ExecOutcome::Verdict::Success;
    } else {
        // failed actuation or an inexecutable action leaves the world as is
        out.verdict = ExecOutcome::Verdict::NoEffect;
    }
    out.direct_obs = observe();
    return out;
}

std::vector<std::string> WorldState::inject(ExoScript& script, int step) {
    std::vector<std::string> applied;
    for (auto& e : script.entries) {
        if (e.fired) continue;
        bool due = e.at_step ? *e.at_step == step : body_holds(e.when, truth_.values);
        if (!due) continue;
        e.fired = true;
        int action = g_->action_by_name(e.action);
        if (action < 0) {
            warnings.push_back("scripted action unknown: " + e.action);
            continue;
        }
        auto res = successor(truth_, action, *g_);
        if (auto* next = std::get_if<State>(&res)) {
            truth_ = std::move(*next);
            applied.push_back(e.action);
        } else {
            warnings.push_back("scripted action skipped (invalid in current state): " + e.action);
        }
    }
    return applied;
}

} // namespace resolute
