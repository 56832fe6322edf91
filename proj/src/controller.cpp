#include "resolute/controller.hpp"

#include <cmath>
#include <ctime>
#include <set>
#include <sstream>

namespace resolute {

double thread_seconds() {
    timespec ts;
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return (double)ts.tv_sec + 1e-9 * (double)ts.tv_nsec;
}

namespace {

std::string fmt_clock(double t) {
    char buf[32];
    snprintf(buf, sizeof(buf), "%.3f", t);
    return buf;
}

struct Controller {
    const TrialSetup& setup;
    const ControllerConfig& cfg;
    const GroundedDescription& cg;
    const GroundedDescription& eg;  // world (execution) grounding
    WorldState world;
    History h;
    MentalState mental;
    RunRecord rec;
    std::ostringstream trace;
    std::optional<Explanation> hint;
    int step = 0;
    bool aborted = false;

    // fine-resolution belief bookkeeping (names survive regrounding)
    std::map<std::string, std::pair<bool, int>> fine_cache;  // atom -> (value, step seen)
    std::string robot_cell;

    Controller(const TrialSetup& s, const ControllerConfig& c)
        : setup(s), cfg(c), cg(*s.coarse_g),
          eg(c.fine_resolution ? *s.fine_g : *s.coarse_g),
          world(eg, s.initial_truth, s.action_model, c.seed, s.profile) {
        for (const auto& o : s.briefing) h.obs.push_back(o);
        mental.active_goal = setup.goal;
    }

    void log(const std::string& kind, const std::string& rest) {
        trace << "t=" << fmt_clock(world.clock()) << " kind=" << kind;
        if (!rest.empty()) trace << " " << rest;
        trace << "\n";
    }

    // ---- reasoning helpers -------------------------------------------------

    ModelResult diagnose() {
        double t0 = thread_seconds();
        DiagnosisConfig dc;
        dc.max_exo = cfg.diagnosis_max_exo;
        dc.hint = hint;
        auto r = consistent_model(cg, h, dc);
        rec.coarse_reasoning_time += thread_seconds() - t0;
        if (auto* m = std::get_if<ModelOfHistory>(&r)) {
            hint = m->explanation;
            if (!m->explanation.exo_insertions.empty() ||
                !m->explanation.default_exceptions.empty()) {
                std::string detail;
                for (auto [s, a] : m->explanation.exo_insertions)
                    detail += cg.action_name(a) + "@" + std::to_string(s) + ";";
                log("diag", "exo=" + std::to_string(m->explanation.exo_insertions.size()) +
                                " exc=" + std::to_string(m->explanation.default_exceptions.size()) +
                                " detail=[" + detail + "]");
            }
        }
        return r;
    }

    std::optional<std::vector<int>> coarse_plan(const State& from) {
        double t0 = thread_seconds();
        auto r = plan_minimal(cg, from, setup.goal, cfg.coarse_horizon);
        rec.coarse_reasoning_time += thread_seconds() - t0;
        ++rec.plans_computed;
        if (auto* p = std::get_if<Plan>(&r)) {
            if (rec.first_plan_length < 0) rec.first_plan_length = p->horizon();
            log("plan", "len=" + std::to_string(p->horizon()));
            return p->actions;
        }
        return std::nullopt;
    }

    // expected direct effects of an action in the believed state
    std::vector<GroundLit> effects_of(int action, const State& believed) const {
        std::vector<GroundLit> out;
        for (int idx : cg.causal_for(action))
            if (body_holds(cg.axioms()[idx].body, believed.values))
                out.push_back(cg.axioms()[idx].head);
        return out;
    }

    // atoms the TP baseline is allowed to notice for an action: its causal
    // heads and bodies plus its executability bodies
    std::set<int> tp_atom_set(int action) const {
        std::set<int> atoms;
        for (int idx : cg.causal_for(action)) {
            atoms.insert(cg.axioms()[idx].head.atom);
            for (const auto& l : cg.axioms()[idx].body) atoms.insert(l.atom);
        }
        for (int idx : cg.exec_for(action))
            for (const auto& l : cg.axioms()[idx].body) atoms.insert(l.atom);
        return atoms;
    }

    std::set<int> relcon_for(const State& believed, int action, const State& sigma2) const {
        CoarseTransition t{believed, action, sigma2};
        auto rel = relevant_constants(cg, t, setup.goal);
        std::set<int> out(rel.begin(), rel.end());
        // believed locations of goal objects keep the zoom wide enough to
        // find objects whose placement rests on defaults
        std::set<int> goal_consts;
        for (const auto& l : setup.goal.literals)
            for (int c : cg.atom_args(l.atom)) goal_consts.insert(c);
        int loc_attr = cg.sig().attr_id(setup.profile.loc_attr);
        if (loc_attr >= 0) {
            for (int atom = 0; atom < cg.atom_count(); ++atom) {
                if (cg.atom_attr(atom) != loc_attr || !believed.holds(atom)) continue;
                auto args = cg.atom_args(atom);
                if (args.size() == 2 && goal_consts.count(args[0])) out.insert(args[1]);
            }
        }
        return out;
    }

    bool atom_over(const std::set<int>& constants, int atom) const {
        for (int c : cg.atom_args(atom))
            if (!constants.count(c)) return false;
        return true;
    }

    // records observations with the mode's filter; returns whether any
    // expected effect was contradicted
    bool record_observations(const std::vector<ObsLit>& obs, const std::set<int>* relcon,
                             const std::set<int>* tp_atoms,
                             const std::vector<GroundLit>& effects, int at_step) {
        std::set<int> effect_atoms;
        for (const auto& e : effects) effect_atoms.insert(e.atom);
        bool contradicted = false;
        for (const auto& e : effects)
            for (const auto& o : obs)
                if (o.atom == e.atom && o.value != e.positive) contradicted = true;
        for (const auto& o : obs) {
            bool keep = effect_atoms.count(o.atom) > 0;
            if (!keep && relcon) keep = atom_over(*relcon, o.atom);
            if (!keep && tp_atoms) keep = tp_atoms->count(o.atom) > 0;
            if (!keep) continue;
            h.observe(o.atom, o.value, at_step);
            log("obs", "step=" + std::to_string(at_step) + " atom=" + cg.atom_name(o.atom) +
                           " value=" + (o.value ? "true" : "false"));
        }
        return contradicted;
    }

    std::vector<ObsLit> coarse_obs_from_text(const std::vector<std::pair<std::string, bool>>& txt) {
        std::vector<ObsLit> out;
        for (const auto& [name, v] : txt) {
            int atom = cg.atom_by_name(name);
            if (atom >= 0) out.push_back({atom, v});
        }
        return out;
    }

    void note_exo(const std::vector<std::string>& applied) {
        for (const auto& a : applied) log("exo", "action=" + a);
    }

    // ---- coarse-direct execution of one abstract action ---------------------

    struct AttemptOutcome {
        bool contradicted = false;
    };

    AttemptOutcome attempt_coarse(int action, const State& believed, const std::set<int>* relcon,
                                  const std::set<int>* tp_atoms) {
        auto effects = effects_of(action, believed);
        h.attempt(action, step);
        log("attempt", "step=" + std::to_string(step) + " action=" + cg.action_name(action));
        note_exo(world.inject(const_cast<ExoScript&>(script_), step));
        auto outcome = world.execute(action);
        rec.execution_time += outcome.elapsed;
        ++rec.actions_executed;
        log("exec", "action=" + cg.action_name(action) + " verdict=" +
                        (outcome.verdict == ExecOutcome::Verdict::Success ? "success" : "noeffect"));

        auto obs = coarse_obs_from_text(outcome.direct_obs);
        bool contradicted = record_observations(obs, relcon, tp_atoms, effects, step + 1);
        h.set_verdict(action, step, !contradicted);
        log(contradicted ? "nothpd" : "hpd",
            "step=" + std::to_string(step) + " action=" + cg.action_name(action));
        ++step;
        h.current_step = step;
        return {contradicted};
    }

    ExoScript script_;  // mutable copy of the setup script

    // ---- fine-resolution implementation of one abstract action --------------

    struct FineEpisode {
        bool ok = false;
        bool aborted = false;
        std::string abort_reason;
        std::vector<std::pair<std::string, bool>> episode_obs;  // coalesced, latest wins
    };

    void seed_robot_cell() {
        auto txt = world.observe();
        std::string loc_prefix = setup.fine->info.fine_loc_attr + "(" +
                                 setup.profile.robot_constant + ",";
        for (const auto& [name, v] : txt) {
            if (!v) continue;
            if (name.rfind(loc_prefix, 0) == 0) {
                robot_cell = name.substr(loc_prefix.size());
                robot_cell.pop_back();  // trailing ')'
                fine_cache[name] = {true, 0};
            }
        }
    }

    void cache_obs(const std::vector<std::pair<std::string, bool>>& txt,
                   std::map<std::string, bool>& episode) {
        std::string loc_prefix = setup.fine->info.fine_loc_attr + "(" +
                                 setup.profile.robot_constant + ",";
        for (const auto& [name, v] : txt) {
            fine_cache[name] = {v, step};
            episode[name] = v;
            if (v && name.rfind(loc_prefix, 0) == 0) {
                robot_cell = name.substr(loc_prefix.size());
                robot_cell.pop_back();
            }
        }
    }

    // cells of a coarse place restricted to the zoom, name-ordered
    std::vector<std::string> cells_of(const std::string& room, const GroundedDescription& zg) const {
        std::vector<std::string> out;
        const auto& info = setup.fine->info;
        auto it = info.components_of.find(room);
        if (it == info.components_of.end()) return out;
        for (const auto& c : it->second)
            if (zg.sig().constant_id(c) >= 0) out.push_back(c);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::string believed_room_of(const std::string& constant, const State& believed) const {
        int loc_attr = cg.sig().attr_id(setup.profile.loc_attr);
        int c = cg.sig().constant_id(constant);
        if (loc_attr < 0 || c < 0) return {};
        for (int atom = 0; atom < cg.atom_count(); ++atom) {
            if (cg.atom_attr(atom) != loc_attr || !believed.holds(atom)) continue;
            auto args = cg.atom_args(atom);
            if (args.size() == 2 && args[0] == c)
                return cg.sig().constant_name(args[1]);
        }
        return {};
    }

    // true when a cached entry is still compatible with the coarse belief
    bool cache_entry_valid(const std::string& atom_name, const State& believed) const {
        const auto& info = setup.fine->info;
        const std::string& fla = info.fine_loc_attr;
        if (atom_name.rfind(fla + "(", 0) != 0) return true;
        auto inner = atom_name.substr(fla.size() + 1, atom_name.size() - fla.size() - 2);
        auto parts = split(inner, ',');
        if (parts.size() != 2) return true;
        std::string thing(trim(parts[0])), cell(trim(parts[1]));
        if (thing == setup.profile.robot_constant) return true;
        std::string whole = info.to_coarse(thing);
        std::string room = info.to_coarse(cell);
        std::string believed_room = believed_room_of(whole, believed);
        auto it = fine_cache.find(atom_name);
        bool value = it != fine_cache.end() && it->second.first;
        // positive sightings in the wrong room are stale; negatives stay useful
        if (value && room != believed_room) return false;
        return true;
    }

    struct InitResult {
        std::optional<PartialState> partial;
        std::string missing_whole;  // set when an object has no candidate cell
        std::vector<std::pair<std::string, bool>> assumed;  // for mismatch detection
    };

    InitResult build_fine_init(const GroundedDescription& zg, const State& believed) {
        const auto& info = setup.fine->info;
        InitResult out;
        PartialState p((int)zg.atom_count());

        int fine_loc = zg.sig().attr_id(info.fine_loc_attr);
        int in_hand_fine = zg.sig().attr_id(
            info.starred_of.count(setup.profile.in_hand_attr)
                ? info.starred_of.at(setup.profile.in_hand_attr)
                : setup.profile.in_hand_attr);

        // held parts follow the robot
        std::set<std::string> held_parts;
        int in_hand_coarse = cg.sig().attr_id(setup.profile.in_hand_attr);
        if (in_hand_coarse >= 0 && in_hand_fine >= 0) {
            for (int atom = 0; atom < cg.atom_count(); ++atom) {
                if (cg.atom_attr(atom) != in_hand_coarse || !believed.holds(atom)) continue;
                auto args = cg.atom_args(atom);
                std::string whole = cg.sig().constant_name(args[1]);
                std::vector<std::string> parts{whole};
                if (info.components_of.count(whole)) parts = info.components_of.at(whole);
                std::sort(parts.begin(), parts.end());
                std::string chosen;
                for (const auto& part : parts) {
                    std::string atom_name = zg.sig().attr(in_hand_fine).name + "(" +
                                            setup.profile.robot_constant + "," + part + ")";
                    auto it = fine_cache.find(atom_name);
                    if (it != fine_cache.end() && it->second.first) { chosen = part; break; }
                }
                if (chosen.empty() && !parts.empty()) chosen = parts.front();
                if (!chosen.empty()) held_parts.insert(chosen);
            }
        }

        // locations per fine thing
        if (fine_loc >= 0) {
            const auto& at = zg.sig().attr(fine_loc);
            for (int thing : zg.sig().members(at.arg_sorts[0])) {
                std::string tn = zg.sig().constant_name(thing);
                std::string cell;
                if (tn == setup.profile.robot_constant) {
                    cell = robot_cell;
                } else if (held_parts.count(tn)) {
                    cell = robot_cell;
                } else {
                    std::string whole = info.to_coarse(tn);
                    std::string room = believed_room_of(whole, believed);
                    auto candidates = cells_of(room, zg);
                    if (candidates.empty() && zg.sig().constant_id(room) >= 0)
                        candidates.push_back(room);  // unmagnified place
                    for (const auto& c : candidates) {
                        std::string atom_name = at.name + "(" + tn + "," + c + ")";
                        auto it = fine_cache.find(atom_name);
                        if (it != fine_cache.end() && it->second.first &&
                            cache_entry_valid(atom_name, believed)) {
                            cell = c;
                            break;
                        }
                    }
                    if (cell.empty()) {
                        for (const auto& c : candidates) {
                            std::string atom_name = at.name + "(" + tn + "," + c + ")";
                            auto it = fine_cache.find(atom_name);
                            bool known_false = it != fine_cache.end() && !it->second.first;
                            if (!known_false) { cell = c; break; }
                        }
                    }
                    if (cell.empty()) {
                        out.missing_whole = whole;
                        return out;
                    }
                    out.assumed.emplace_back(at.name + "(" + tn + "," + cell + ")", true);
                }
                if (cell.empty()) continue;
                for (int place : zg.sig().members(at.arg_sorts[1])) {
                    int atom = zg.atom_id(fine_loc, {thing, place});
                    if (atom >= 0)
                        p.assign(atom, zg.sig().constant_name(place) == cell);
                }
            }
        }

        // remaining basic fluents: named coarse values pass through,
        // knowledge fluents start unobserved, anything else defaults false
        for (int atom : zg.basic_atoms()) {
            if (p.known.test(atom)) continue;
            std::string name = zg.atom_name(atom);
            if (in_hand_fine >= 0 && zg.atom_attr(atom) == in_hand_fine) {
                auto args = zg.atom_args(atom);
                p.assign(atom, held_parts.count(zg.sig().constant_name(args[1])) > 0);
                continue;
            }
            int catom = cg.atom_by_name(name);
            if (catom >= 0) {
                p.assign(atom, believed.holds(catom));
                continue;
            }
            p.assign(atom, false);
        }
        out.partial = std::move(p);
        return out;
    }

    FineEpisode implement_fine(int action, const State& believed, const State& sigma2,
                               const std::set<int>& relcon) {
        FineEpisode ep;
        std::map<std::string, bool> episode_obs;

        double t_zoom0 = thread_seconds();
        std::optional<ZoomedDescription> zoomed;
        const SystemDescription* plan_desc;
        if (cfg.zooming) {
            std::vector<std::string> names;
            for (int c : relcon) names.push_back(cg.sig().constant_name(c));
            zoomed = zoom(*setup.fine, names);
            plan_desc = &zoomed->desc;
        } else {
            plan_desc = &setup.fine->desc;
        }

        std::optional<GroundedDescription> zg_store;
        try {
            GroundLimits lim;
            lim.max_axiom_instances = cfg.ground_budget;
            zg_store.emplace(ground(*plan_desc, lim));
        } catch (const ResourceLimitError& e) {
            rec.fine_reasoning_time += thread_seconds() - t_zoom0;
            ep.aborted = true;
            ep.abort_reason = std::string("fine grounding: ") + e.what();
            return ep;
        }
        const GroundedDescription& zg = *zg_store;
        rec.fine_reasoning_time += thread_seconds() - t_zoom0;

        // fine goal: the coarse literals this transition changes, read
        // through the bridge-defined coarse fluents of the zoomed signature
        Goal fine_goal;
        for (int atom = 0; atom < cg.atom_count(); ++atom) {
            if (cg.atom_is_static(atom)) continue;
            if (believed.values.test(atom) == sigma2.values.test(atom)) continue;
            int zatom = zg.atom_by_name(cg.atom_name(atom));
            if (zatom >= 0) fine_goal.literals.push_back({zatom, sigma2.values.test(atom)});
        }
        if (fine_goal.literals.empty()) {
            ep.ok = true;  // nothing to realize at fine resolution
            return ep;
        }

        SearchLimits sl;
        if (!cfg.plan_with_sensing) {
            for (int a : zg.agent_actions()) sl.action_filter.push_back(a);
        } else {
            for (int a : zg.agent_actions()) sl.action_filter.push_back(a);
            for (int a : zg.knowledge_actions()) sl.action_filter.push_back(a);
            std::sort(sl.action_filter.begin(), sl.action_filter.end());
        }

        int max_replans = 4 + 2 * (int)setup.fine->info.component_of.size();
        for (int round = 0; round < max_replans; ++round) {
            auto init_r = build_fine_init(zg, believed);
            if (!init_r.partial) {
                // no admissible placement left for some object
                break;
            }
            double t0 = thread_seconds();
            auto comp = complete_state(*init_r.partial, zg);
            if (std::holds_alternative<Inconsistent>(comp)) {
                rec.fine_reasoning_time += thread_seconds() - t0;
                break;
            }
            State init = std::get<State>(comp);
            sl.deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds((long)(cfg.fine_plan_timeout_s * 1000));
            auto pr = plan_minimal(zg, init, fine_goal, cfg.fine_horizon, sl);
            rec.fine_reasoning_time += thread_seconds() - t0;
            ++rec.fine_plans_computed;

            if (std::holds_alternative<SearchBudgetExceeded>(pr)) {
                ep.aborted = true;
                ep.abort_reason = "fine planning exceeded its budget";
                return ep;
            }
            if (std::holds_alternative<Unsat>(pr)) break;
            auto plan = std::get<Plan>(pr).actions;
            log("fineplan", "len=" + std::to_string(plan.size()) + " round=" +
                                std::to_string(round) + " zoom=" + (cfg.zooming ? "1" : "0"));

            State expected = init;
            bool mismatch = false;
            bool all_done = true;
            for (int za : plan) {
                int wa = eg.action_by_name(zg.action_name(za));
                if (wa < 0) { mismatch = true; break; }
                auto outcome = world.execute(wa);
                rec.execution_time += outcome.elapsed;
                ++rec.actions_executed;
                log("exec", "action=" + zg.action_name(za) + " verdict=" +
                                (outcome.verdict == ExecOutcome::Verdict::Success ? "success"
                                                                                  : "noeffect"));
                cache_obs(outcome.direct_obs, episode_obs);
                if (outcome.verdict != ExecOutcome::Verdict::Success) {
                    mismatch = true;
                    all_done = false;
                    break;
                }
                auto res = successor(expected, za, zg);
                if (auto* nx = std::get_if<State>(&res)) expected = std::move(*nx);
                for (const auto& [name, v] : outcome.direct_obs) {
                    int za2 = zg.atom_by_name(name);
                    if (za2 >= 0 && expected.holds(za2) != v) mismatch = true;
                }
                if (mismatch) { all_done = false; break; }
            }
            if (!mismatch && all_done && fine_goal.satisfied_by(expected)) {
                ep.ok = true;
                break;
            }
        }

        // target-object knowledge accumulated across the attempt feeds the
        // coarse history, covering complete not-found sweeps
        std::set<int> goal_consts;
        for (const auto& l : setup.goal.literals)
            for (int c : cg.atom_args(l.atom)) goal_consts.insert(c);
        for (const auto& [name, entry] : fine_cache) {
            if (episode_obs.count(name)) continue;
            if (!cache_entry_valid(name, believed)) continue;
            // only entries about relevant wholes are added
            bool relevant = false;
            for (int c : relcon) {
                const std::string cn = cg.sig().constant_name(c);
                if (name.find(cn) != std::string::npos) { relevant = true; break; }
                auto comp = setup.fine->info.components_of.find(cn);
                if (comp != setup.fine->info.components_of.end())
                    for (const auto& part : comp->second)
                        if (name.find(part) != std::string::npos) { relevant = true; break; }
                if (relevant) break;
            }
            if (relevant) episode_obs[name] = entry.first;
        }
        ep.episode_obs.assign(episode_obs.begin(), episode_obs.end());
        return ep;
    }

    AttemptOutcome attempt_fine(int action, const State& believed, const std::set<int>& relcon) {
        auto effects = effects_of(action, believed);
        auto res = successor(believed, action, cg);
        State sigma2 = std::get<State>(res);

        h.attempt(action, step);
        log("attempt", "step=" + std::to_string(step) + " action=" + cg.action_name(action));
        note_exo(world.inject(script_, step));

        auto ep = implement_fine(action, believed, sigma2, relcon);
        if (ep.aborted) {
            aborted = true;
            rec.completed = false;
            rec.termination = ep.abort_reason;
            return {};
        }

        auto lifted = lift_observations(ep.episode_obs, setup.fine->info, cg);
        bool contradicted = !ep.ok;
        bool obs_contradiction =
            record_observations(lifted, &relcon, nullptr, effects, step + 1);
        contradicted = contradicted || obs_contradiction;
        h.set_verdict(action, step, !contradicted);
        log(contradicted ? "nothpd" : "hpd",
            "step=" + std::to_string(step) + " action=" + cg.action_name(action));
        ++step;
        h.current_step = step;
        return {contradicted};
    }

    // ---- goal verification against ground truth ------------------------------

    bool truth_satisfies_goal() const {
        if (!cfg.fine_resolution) return world.goal_holds(setup.goal);
        Goal fg;
        for (const auto& l : setup.goal.literals) {
            int atom = eg.atom_by_name(cg.atom_name(l.atom));
            if (atom < 0) return false;
            fg.literals.push_back({atom, l.positive});
        }
        return world.goal_holds(fg);
    }

    // ---- mode loops ----------------------------------------------------------

    void run_ati() {
        int iterations = 0;
        while (true) {
            if (++iterations > cfg.max_steps * 5 || step > cfg.max_steps) {
                rec.termination = "step budget exhausted";
                return;
            }
            if (rec.plans_computed > cfg.max_plans) {
                rec.termination = "plan budget exhausted";
                return;
            }
            auto mr = diagnose();
            auto* model = std::get_if<ModelOfHistory>(&mr);
            if (!model) {
                rec.termination = "no consistent model: " + std::get<NoModel>(mr).reason;
                return;
            }
            double t0 = thread_seconds();
            IntendedAction ia = next_intended_action(mental, *model, cg);
            rec.coarse_reasoning_time += thread_seconds() - t0;

            switch (ia.kind) {
                case IntendedAction::Kind::Done:
                    rec.believed_achieved = true;
                    rec.termination = "goal achieved in belief";
                    log("done", "believed=true");
                    return;
                case IntendedAction::Kind::Stop:
                    h.mental.push_back({MentalRec::Kind::Stop, ia.activity_name, step});
                    log("mental", "act=stop name=" + std::to_string(ia.activity_name));
                    stop_activity(mental);
                    break;
                case IntendedAction::Kind::Replan: {
                    auto plan = coarse_plan(model->final_state());
                    if (!plan) {
                        rec.termination = "no plan within horizon";
                        return;
                    }
                    auto created = create_activity(mental, setup.goal, *plan, *model, cg);
                    if (std::holds_alternative<ActivityRejected>(created)) {
                        rec.termination = "activity rejected";
                        return;
                    }
                    int name = std::get<Activity>(created).name;
                    start_activity(mental, name);
                    h.mental.push_back({MentalRec::Kind::Start, name, step});
                    log("mental", "act=start name=" + std::to_string(name));
                    break;
                }
                case IntendedAction::Kind::Start:
                    break;  // handled with Replan
                case IntendedAction::Kind::Agent: {
                    const State& believed = model->final_state();
                    auto res = successor(believed, ia.action, cg);
                    auto* s2 = std::get_if<State>(&res);
                    if (!s2) {
                        // projection said executable; treat as a failed attempt
                        stop_activity(mental);
                        break;
                    }
                    auto relcon = relcon_for(believed, ia.action, *s2);
                    AttemptOutcome ao = cfg.fine_resolution
                                            ? attempt_fine(ia.action, believed, relcon)
                                            : attempt_coarse(ia.action, believed, &relcon, nullptr);
                    if (aborted) return;
                    advance(mental, ao.contradicted ? AttemptRec::Verdict::NotHappened
                                                    : AttemptRec::Verdict::Happened);
                    break;
                }
            }
        }
    }

    void run_tp() {
        std::vector<int> plan;
        std::size_t idx = 0;
        bool have_plan = false;
        int iterations = 0;
        while (true) {
            if (++iterations > cfg.max_steps * 5 || step > cfg.max_steps) {
                rec.termination = "step budget exhausted";
                return;
            }
            if (rec.plans_computed > cfg.max_plans) {
                rec.termination = "plan budget exhausted";
                return;
            }
            auto mr = diagnose();
            auto* model = std::get_if<ModelOfHistory>(&mr);
            if (!model) {
                rec.termination = "no consistent model: " + std::get<NoModel>(mr).reason;
                return;
            }
            if (!have_plan) {
                if (goal_achieved(*model, setup.goal)) {
                    rec.believed_achieved = true;
                    rec.termination = "plan exhausted, believed complete";
                    log("done", "believed=true");
                    return;
                }
                auto p = coarse_plan(model->final_state());
                if (!p) {
                    rec.termination = "no plan within horizon";
                    return;
                }
                plan = *p;
                idx = 0;
                have_plan = true;
                if (plan.empty()) {
                    rec.believed_achieved = true;
                    rec.termination = "empty plan, believed complete";
                    log("done", "believed=true");
                    return;
                }
            }
            int action = plan[idx];
            auto tp_atoms = tp_atom_set(action);
            AttemptOutcome ao =
                attempt_coarse(action, model->final_state(), nullptr, &tp_atoms);
            if (ao.contradicted) {
                // action failed: drop the plan, diagnose, replan
                have_plan = false;
            } else if (++idx >= plan.size()) {
                have_plan = false;
                // loop re-enters, checks the believed goal and stops
            }
        }
    }

    RunRecord run() {
        script_ = setup.script;
        trace << "# trial " << setup.label << " mode="
              << (cfg.mode == ControllerConfig::Mode::ATI ? "ati" : "tp")
              << " fine=" << (cfg.fine_resolution ? 1 : 0)
              << " zoom=" << (cfg.zooming ? 1 : 0) << " seed=" << cfg.seed << "\n";
        if (cfg.fine_resolution) {
            if (!setup.fine || !setup.fine_g)
                throw std::runtime_error("fine trial without a refined description");
            if (cfg.mode == ControllerConfig::Mode::TP)
                throw std::runtime_error("the TP baseline runs at coarse resolution only");
            seed_robot_cell();
        }
        if (cfg.mode == ControllerConfig::Mode::ATI) run_ati();
        else run_tp();

        rec.goal_achieved = !aborted && truth_satisfies_goal();
        rec.planning_time = rec.coarse_reasoning_time + rec.fine_reasoning_time;
        trace << "# result achieved=" << (rec.goal_achieved ? 1 : 0)
              << " believed=" << (rec.believed_achieved ? 1 : 0)
              << " completed=" << (rec.completed ? 1 : 0)
              << " actions=" << rec.actions_executed
              << " plans=" << rec.plans_computed
              << " exec_time=" << fmt_clock(rec.execution_time) << "\n";
        rec.trace = trace.str();
        return rec;
    }
};

} // namespace

RunRecord run_goal(const TrialSetup& setup, const ControllerConfig& config) {
    Controller c(setup, config);
    return c.run();
}

std::pair<RunRecord, RunRecord> run_paired(const TrialSetup& setup, const ControllerConfig& a,
                                           const ControllerConfig& b) {
    RunRecord ra = run_goal(setup, a);
    RunRecord rb = run_goal(setup, b);
    return {ra, rb};
}

} // namespace resolute
