#pragma once

#include "resolute/executor.hpp"
#include "resolute/history.hpp"
#include "resolute/intention.hpp"

namespace resolute {

struct ControllerConfig {
    enum class Mode { ATI, TP } mode = Mode::ATI;
    bool fine_resolution = false;  // execute abstract actions directly when false
    bool zooming = true;
    int coarse_horizon = 20;
    int fine_horizon = 40;
    double fine_plan_timeout_s = 60.0;
    int diagnosis_max_exo = 2;
    int max_steps = 150;
    int max_plans = 80;
    bool plan_with_sensing = false;  // admit test actions into fine plan search
    std::size_t ground_budget = 5'000'000;
    uint64_t seed = 0;

    bool operator==(const ControllerConfig& o) const = default;
};

struct RunRecord {
    bool goal_achieved = false;   // verified against ground truth
    bool believed_achieved = false;
    bool completed = true;        // false when budgets/timeouts aborted the trial
    int plans_computed = 0;
    int fine_plans_computed = 0;
    int actions_executed = 0;     // physical attempts, coarse or concrete
    double planning_time = 0.0;   // reasoning wall-clock (thread time), seconds
    double coarse_reasoning_time = 0.0;
    double fine_reasoning_time = 0.0;
    double execution_time = 0.0;  // simulated units
    int first_plan_length = -1;
    std::string termination;
    std::string trace;
};

// Everything a single trial needs; descriptions and groundings are shared
// across trials and never mutated.
struct TrialSetup {
    const SystemDescription* coarse = nullptr;
    const GroundedDescription* coarse_g = nullptr;
    const FineDescription* fine = nullptr;        // required for fine trials
    const GroundedDescription* fine_g = nullptr;  // world resolution for fine trials
    Goal goal;                                    // over the coarse grounding
    std::vector<ObsRec> briefing;                 // step-0 observations
    State initial_truth;                          // over the execution grounding
    ExoScript script;
    ActionModel action_model;
    DomainProfile profile;
    std::string label;  // for trace headers
};

RunRecord run_goal(const TrialSetup& setup, const ControllerConfig& config);

// Runs the same trial (identical world and script) under two configs.
std::pair<RunRecord, RunRecord> run_paired(const TrialSetup& setup,
                                           const ControllerConfig& a,
                                           const ControllerConfig& b);

double thread_seconds();

} // namespace resolute
