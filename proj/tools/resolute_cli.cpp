#include "resolute/bench.hpp"
#include "resolute/parser.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace resolute;

namespace {

Goal parse_goal(const GroundedDescription& g, const std::string& text) {
    Goal goal;
    for (auto part : split(text, ';')) {
        std::string lit(trim(part));
        if (lit.empty()) continue;
        bool pos = true;
        if (lit[0] == '-') {
            pos = false;
            lit = lit.substr(1);
        }
        int atom = g.atom_by_name(lit);
        if (atom < 0) throw std::runtime_error("unknown goal literal: " + lit);
        goal.literals.push_back({atom, pos});
    }
    return goal;
}

int cmd_plan(const std::string& file, const std::string& goal_text, int horizon) {
    SystemDescription desc = load_domain_file(file);
    GroundedDescription g = ground(desc);
    Goal goal = parse_goal(g, goal_text);

    // initial state: step-0 observations from the `initial:` section plus
    // prioritized defaults
    History h;
    for (const auto& f : desc.initial_obs) {
        int atom = g.atom_id(f.attr, f.args);
        if (atom >= 0) h.observe(atom, f.positive, 0);
    }
    auto candidates = initial_state_candidates(g, h, 4, 1);
    if (candidates.empty()) {
        std::cerr << "no consistent initial state\n";
        return 2;
    }
    auto pr = plan_minimal(g, candidates.front(), goal, horizon);
    if (auto* plan = std::get_if<Plan>(&pr)) {
        for (int a : plan->actions) std::cout << g.action_name(a) << "\n";
        std::cerr << "plan length " << plan->horizon() << "\n";
        return 0;
    }
    if (std::holds_alternative<Unsat>(pr)) {
        std::cerr << "no plan within horizon " << horizon << "\n";
        return 1;
    }
    std::cerr << "search budget exceeded\n";
    return 3;
}

int cmd_inspect(const std::string& file) {
    SystemDescription desc = load_domain_file(file);
    GroundedDescription g = ground(desc);
    std::cout << "atoms: " << g.atom_count() << "\n"
              << "  statics: " << g.static_atoms().size() << "\n"
              << "  basic fluents: " << g.basic_atoms().size() << "\n"
              << "  defined fluents: " << g.defined_atoms().size() << "\n"
              << "actions: " << g.action_count() << " (agent " << g.agent_actions().size()
              << ", exogenous " << g.exo_actions().size() << ", knowledge "
              << g.knowledge_actions().size() << ")\n"
              << "ground axioms: " << g.axioms().size() << "\n"
              << "grounding work: " << g.grounding_work() << " instances\n";
    if (desc.refinement) {
        auto fine = refine(desc);
        GroundedDescription fg = ground(fine.desc);
        std::cout << "refined atoms: " << fg.atom_count() << ", ground axioms: "
                  << fg.axioms().size() << "\n";
    }
    return 0;
}

int cmd_trace(int scenario, const std::string& mode, uint64_t seed, const std::string& out) {
    auto inst = generate_scenario(scenario, seed);
    ControllerConfig cfg;
    cfg.mode = mode == "tp" ? ControllerConfig::Mode::TP : ControllerConfig::Mode::ATI;
    cfg.seed = seed;
    RunRecord rec = run_goal(*inst.setup, cfg);
    if (out.empty()) {
        std::cout << rec.trace;
    } else {
        std::ofstream f(out);
        f << rec.trace;
    }
    std::cerr << "achieved=" << rec.goal_achieved << " actions=" << rec.actions_executed
              << " plans=" << rec.plans_computed << " exec_time=" << rec.execution_time
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-resolution intentional planning engine"};
    app.require_subcommand(1);

    std::string domain_file, goal_text, mode = "ati", out_dir, out_file;
    int horizon = 20, scenario = 1, trials = 30, jobs = 1;
    uint64_t seed = 1;
    double timeout = 60.0;
    bool no_zoom = false, json_out = false, traces = false;

    auto* plan = app.add_subcommand("plan", "compute a minimal plan for a domain file");
    plan->add_option("domain", domain_file, "domain file")->required();
    plan->add_option("--goal", goal_text, "goal literals, ';'-separated")->required();
    plan->add_option("--max-horizon", horizon, "maximum plan length");

    auto* inspect = app.add_subcommand("inspect", "parse, ground and summarize a domain file");
    inspect->add_option("domain", domain_file, "domain file")->required();

    auto* trace = app.add_subcommand("trace", "run one scenario trial and print its trace");
    trace->add_option("--scenario", scenario, "scenario id 1..5")->required();
    trace->add_option("--mode", mode, "ati|tp");
    trace->add_option("--seed", seed, "trial seed");
    trace->add_option("--out", out_file, "write the trace to a file");

    auto* bench = app.add_subcommand("bench", "run the paired-trial experiments");
    std::string which;
    bench->add_option("experiment", which, "h1h2|h3")->required();
    bench->add_option("--trials", trials, "paired trials per scenario (h1h2) or per level");
    bench->add_option("--seed", seed, "master seed");
    bench->add_option("--out", out_dir, "output directory");
    bench->add_option("--jobs", jobs, "worker threads");
    bench->add_option("--timeout", timeout, "fine-plan timeout in seconds");
    bench->add_flag("--no-zoom", no_zoom, "(h3) also disables zooming for the zoomed arm");
    bench->add_flag("--json", json_out, "print the JSON report to stdout");
    bench->add_flag("--traces", traces, "write per-trial traces under out/traces");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*plan) return cmd_plan(domain_file, goal_text, horizon);
        if (*inspect) return cmd_inspect(domain_file);
        if (*trace) return cmd_trace(scenario, mode, seed, out_file);
        if (*bench) {
            ExperimentOptions opts;
            opts.trials = trials;
            opts.level_trials = std::min(trials, 10);
            opts.seed = seed;
            opts.jobs = jobs;
            opts.out_dir = out_dir;
            opts.fine_plan_timeout_s = timeout;
            opts.write_traces = traces;
            if (which == "h1h2") {
                auto rep = run_h1h2(opts);
                std::cout << (json_out ? rep.json : rep.table);
                std::cout << (rep.pass() ? "\nall gates passed\n" : "\nGATE FAILURES\n");
                return rep.pass() ? 0 : 1;
            }
            if (which == "h3") {
                auto rep = run_h3(opts);
                std::cout << (json_out ? rep.json : rep.table);
                std::cout << (rep.pass() ? "\nall gates passed\n" : "\nGATE FAILURES\n");
                return rep.pass() ? 0 : 1;
            }
            std::cerr << "unknown experiment: " << which << "\n";
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
