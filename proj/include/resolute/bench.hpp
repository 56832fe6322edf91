#pragma once

#include "resolute/controller.hpp"

#include <memory>

namespace resolute {

// Canonical four-room robot-assistant domain used by the scenario suite.
const std::string& ra_domain_source();
// Variant with a refinement block (rooms magnified into grid cells).
const std::string& ra_fine_domain_source();

struct ScenarioInstance {
    std::shared_ptr<const SystemDescription> desc;
    std::shared_ptr<const GroundedDescription> g;
    std::shared_ptr<TrialSetup> setup;
    int scenario = 0;
    uint64_t seed = 0;
};

// Samples a solvable instance of scenarios 1..5 (identical distribution of
// initial conditions, per-scenario surprise scripts). Deterministic in the
// seed; throws after 100 failed sampling attempts.
ScenarioInstance generate_scenario(int id, uint64_t seed);

struct LevelSpec {
    int id = 1;
    int rooms = 2;
    int cells_per_room = 2;
    std::vector<int> object_parts;  // one entry per object
};
LevelSpec level_spec(int id);  // 1..8
std::string level_domain_text(const LevelSpec& spec);

struct LevelInstance {
    std::shared_ptr<const SystemDescription> coarse;
    std::shared_ptr<const GroundedDescription> coarse_g;
    std::shared_ptr<const FineDescription> fine;
    std::shared_ptr<const GroundedDescription> fine_g;
    std::shared_ptr<TrialSetup> setup;
    int level = 1;
    uint64_t seed = 0;
};

// Find-and-deliver task at the given complexity level: the target object's
// real placement is sampled while the agent's beliefs rest on the initial
// defaults.
LevelInstance generate_level(int id, uint64_t seed);

// one-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2)
double sign_test_p(int wins, int n);

struct PairAggregate {
    int n = 0;
    int acc_tp = 0, acc_ati = 0;
    std::vector<double> ratio_total, ratio_plans, ratio_plan_time, ratio_exec_time,
        ratio_actions;
    // raw per-pair records for the gates
    std::vector<RunRecord> tp, ati;
};

struct H1H2Report {
    std::map<int, PairAggregate> by_scenario;
    std::string csv, table;
    std::string json;
    // acceptance gates
    bool gate_s5_dichotomy = false;
    bool gate_s34_direction = false;
    bool gate_s1_overhead = false;
    bool gate_s2_efficiency = false;
    bool pass() const {
        return gate_s5_dichotomy && gate_s34_direction && gate_s1_overhead &&
               gate_s2_efficiency;
    }
};

struct LevelAggregate {
    int n_zoom = 0, n_nozoom = 0;
    int completed_zoom = 0, completed_nozoom = 0;
    int achieved_zoom = 0;
    std::vector<double> fine_time_zoom, coarse_time_zoom, total_time_zoom,
        per_plan_zoom;
    std::vector<double> fine_time_nozoom, coarse_time_nozoom, per_plan_nozoom;
};

struct H3Report {
    std::map<int, LevelAggregate> by_level;
    std::string csv, table, json;
    bool gate_zoom_completion = false;
    bool gate_nozoom_pattern = false;
    bool gate_per_plan_monotone = false;
    bool gate_l7_l8 = false;
    bool pass() const {
        return gate_zoom_completion && gate_nozoom_pattern && gate_per_plan_monotone &&
               gate_l7_l8;
    }
};

struct ExperimentOptions {
    int trials = 30;             // paired trials per scenario
    int level_trials = 10;       // zoomed trials per level
    int level_nozoom_trials = 4; // no-zoom trials per level (they time out high up)
    uint64_t seed = 1;
    int jobs = 1;
    double fine_plan_timeout_s = 60.0;
    bool noise_free = true;
    std::string out_dir;  // empty: no files written
    bool write_traces = false;
};

H1H2Report run_h1h2(const ExperimentOptions& opts);
H3Report run_h3(const ExperimentOptions& opts);

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);
double median(std::vector<double> v);

} // namespace resolute
