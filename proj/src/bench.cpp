#include "resolute/bench.hpp"
#include "resolute/parser.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace resolute {

using nlohmann::json;

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / (double)v.size();
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v), s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (double)(v.size() - 1));
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double sign_test_p(int wins, int n) {
    // one-sided exact binomial tail at p = 1/2
    if (n <= 0) return 1.0;
    double p = 0.0;
    for (int k = wins; k <= n; ++k) {
        double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        p += std::exp(logc - n * std::log(2.0));
    }
    return std::min(1.0, p);
}

namespace {

template <typename F>
void parallel_for(int n, int jobs, F&& f) {
    if (jobs <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    int count = std::min(jobs, n);
    for (int j = 0; j < count; ++j)
        workers.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) f(i);
        });
    for (auto& w : workers) w.join();
}

} // namespace

const std::string& ra_domain_source() {
    static const std::string src = R"dom(# Robot-assistant domain: four rooms in a row, two books, one robot.
# offices open into the kitchen, the library is beyond it; only the
# library door locks.

sorts:
  place = {kitchen, library, office_1, office_2}
  robot = {rob_1}
  book = {book_1, book_2}
  color = {red, blue}
  object = book
  thing = object + robot

statics:
  next_to(place, place)
  obj_color(object, color)

fluents basic:
  loc(thing, place)
  in_hand(robot, object)
  locked(place)

fluents defined:
  somewhere(thing)

actions agent:
  move(robot, place)
  pickup(robot, object)
  putdown(robot, object)
  unlock(robot, place)

actions exogenous:
  exo_move(object, place)
  exo_lock(place)

axioms:
  move(R, P) causes loc(R, P)
  pickup(R, O) causes in_hand(R, O)
  putdown(R, O) causes -in_hand(R, O)
  unlock(R, P) causes -locked(P)
  exo_move(O, P) causes loc(O, P)
  exo_lock(P) causes locked(P)
  -loc(T, P2) if loc(T, P1), P1 != P2
  loc(O, P) if loc(R, P), in_hand(R, O)
  next_to(P1, P2) if next_to(P2, P1)
  somewhere(T) if loc(T, P)
  never -somewhere(T)
  impossible move(R, P) if loc(R, P)
  impossible move(R, P2) if loc(R, P1), -next_to(P1, P2)
  impossible move(R, P) if locked(P)
  impossible pickup(R, O) if loc(R, P1), loc(O, P2), P1 != P2
  impossible pickup(R, O) if in_hand(R, O2)
  impossible putdown(R, O) if -in_hand(R, O)
  impossible unlock(R, P2) if loc(R, P1), -next_to(P1, P2)
  impossible unlock(R, P) if -locked(P)
  impossible exo_move(O, P) if loc(O, P)
  impossible exo_move(O, P) if in_hand(R, O)
  impossible exo_lock(P) if P != library
  impossible exo_lock(P) if locked(P)

defaults:
  1: loc(X, library) if book(X)
  2: loc(X, office_1) if book(X), -loc(X, library)

facts:
  next_to(office_1, kitchen)
  next_to(office_2, kitchen)
  next_to(kitchen, library)
  obj_color(book_1, red)
  obj_color(book_2, blue)
)dom";
    return src;
}

const std::string& ra_fine_domain_source() {
    static const std::string src = [] {
        std::string s = ra_domain_source();
        // insert the cup and its refinement block
        auto pos = s.find("  color = {red, blue}");
        s.insert(pos, "  cup = {cup_1}\n");
        pos = s.find("  object = book\n");
        s.replace(pos, std::string("  object = book\n").size(), "  object = book + cup\n");
        s += R"dom(
refinement:
  counterpart place = place* {
    kitchen = {kitchen_c1, kitchen_c2, kitchen_c3, kitchen_c4}
    library = {library_c1, library_c2, library_c3, library_c4}
    office_1 = {office_1_c1, office_1_c2, office_1_c3, office_1_c4}
    office_2 = {office_2_c1, office_2_c2, office_2_c3, office_2_c4}
  }
  counterpart cup = cup* {
    cup_1 = {cup_1_base, cup_1_handle}
  }
  fact next_to*(office_1_c1, office_1_c2)
  fact next_to*(office_1_c2, office_1_c3)
  fact next_to*(office_1_c3, office_1_c4)
  fact next_to*(office_1_c4, kitchen_c1)
  fact next_to*(office_2_c1, office_2_c2)
  fact next_to*(office_2_c2, office_2_c3)
  fact next_to*(office_2_c3, office_2_c4)
  fact next_to*(office_2_c4, kitchen_c2)
  fact next_to*(kitchen_c1, kitchen_c2)
  fact next_to*(kitchen_c2, kitchen_c3)
  fact next_to*(kitchen_c3, kitchen_c4)
  fact next_to*(kitchen_c4, library_c1)
  fact next_to*(library_c1, library_c2)
  fact next_to*(library_c2, library_c3)
  fact next_to*(library_c3, library_c4)
)dom";
        return s;
    }();
    return src;
}

namespace {

struct RaShared {
    std::shared_ptr<const SystemDescription> desc;
    std::shared_ptr<const GroundedDescription> g;
};

const RaShared& ra_shared() {
    static const RaShared shared = [] {
        RaShared s;
        auto d = std::make_shared<SystemDescription>(
            parse_domain_or_throw(ra_domain_source(), "ra.dom"));
        s.desc = d;
        s.g = std::make_shared<GroundedDescription>(ground(*d));
        return s;
    }();
    return shared;
}

int require_atom(const GroundedDescription& g, const std::string& name) {
    int a = g.atom_by_name(name);
    if (a < 0) throw std::runtime_error("missing atom: " + name);
    return a;
}

} // namespace

ScenarioInstance generate_scenario(int id, uint64_t seed) {
    if (id < 1 || id > 5) throw std::runtime_error("scenario id must be 1..5");
    const RaShared& ra = ra_shared();
    const GroundedDescription& g = *ra.g;
    std::mt19937_64 rng(derive_seed(seed, 100 + id, 0));

    const std::vector<std::string> rooms = {"kitchen", "library", "office_1", "office_2"};
    auto pick_room = [&](auto&& ok) {
        for (int tries = 0; tries < 64; ++tries) {
            const std::string& r = rooms[rng() % rooms.size()];
            if (ok(r)) return r;
        }
        return rooms[0];
    };

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::string L = rooms[rng() % rooms.size()];
        std::string R0 = rooms[rng() % rooms.size()];
        std::string B2 = pick_room([&](const std::string& r) { return r != L; });
        if (B2 == L) continue;

        // ground truth: robot at R0 holding book_1, book_2 at B2, all open
        PartialState truth_p((int)g.atom_count());
        auto set_loc = [&](const std::string& thing, const std::string& room) {
            for (const auto& p : rooms)
                truth_p.assign(require_atom(g, "loc(" + thing + "," + p + ")"), p == room);
        };
        set_loc("rob_1", R0);
        set_loc("book_1", R0);
        set_loc("book_2", B2);
        truth_p.assign(require_atom(g, "in_hand(rob_1,book_1)"), true);
        truth_p.assign(require_atom(g, "in_hand(rob_1,book_2)"), false);
        for (const auto& p : rooms)
            truth_p.assign(require_atom(g, "locked(" + p + ")"), false);
        auto truth_r = complete_state(truth_p, g);
        if (!std::holds_alternative<State>(truth_r)) continue;
        State truth = std::get<State>(truth_r);

        // delivery means the books are in the goal room and out of the hand
        Goal goal;
        goal.literals.push_back({require_atom(g, "loc(book_1," + L + ")"), true});
        goal.literals.push_back({require_atom(g, "loc(book_2," + L + ")"), true});
        goal.literals.push_back({require_atom(g, "in_hand(rob_1,book_1)"), false});
        goal.literals.push_back({require_atom(g, "in_hand(rob_1,book_2)"), false});
        if (goal.satisfied_by(truth)) continue;

        auto pr = plan_minimal(g, truth, goal, 20);
        auto* plan = std::get_if<Plan>(&pr);
        if (!plan || plan->actions.empty()) continue;

        // per-scenario surprise
        ExoScript script;
        bool ok = true;
        switch (id) {
            case 1:
                break;
            case 2: {
                ExoEntry e;
                e.when.push_back({require_atom(g, "loc(rob_1," + L + ")"), true});
                e.action = "exo_move(book_2," + L + ")";
                script.entries.push_back(e);
                break;
            }
            case 3: {
                std::string C = pick_room(
                    [&](const std::string& r) { return r != B2 && r != L; });
                if (C == B2 || C == L) { ok = false; break; }
                ExoEntry e;
                e.at_step = 0;
                e.action = "exo_move(book_2," + C + ")";
                script.entries.push_back(e);
                break;
            }
            case 4: {
                // destination must lie on the robot's believed route before
                // it reaches book_2, so the surprise is actually observable
                State cur = truth;
                std::vector<std::string> route;
                int pickup_at = -1;
                for (std::size_t i = 0; i < plan->actions.size(); ++i) {
                    auto res = successor(cur, plan->actions[i], g);
                    cur = std::get<State>(res);
                    for (const auto& p : rooms)
                        if (cur.holds(require_atom(g, "loc(rob_1," + p + ")")))
                            route.push_back(p);
                    if (g.action_name(plan->actions[i]) == "pickup(rob_1,book_2)") {
                        pickup_at = (int)i;
                        break;
                    }
                }
                std::vector<std::string> candidates;
                for (const auto& r : route)
                    if (r != B2 && r != L &&
                        std::find(candidates.begin(), candidates.end(), r) == candidates.end())
                        candidates.push_back(r);
                if (pickup_at < 0 || candidates.empty()) { ok = false; break; }
                ExoEntry e;
                e.at_step = 0;
                e.action = "exo_move(book_2," + candidates[rng() % candidates.size()] + ")";
                script.entries.push_back(e);
                break;
            }
            case 5: {
                std::string C = pick_room([&](const std::string& r) { return r != L; });
                if (C == L) { ok = false; break; }
                ExoEntry e;
                e.when.push_back({require_atom(g, "in_hand(rob_1,book_2)"), true});
                e.action = "exo_move(book_1," + C + ")";
                script.entries.push_back(e);
                break;
            }
        }
        if (!ok) continue;

        ScenarioInstance inst;
        inst.desc = ra.desc;
        inst.g = ra.g;
        inst.scenario = id;
        inst.seed = seed;
        auto setup = std::make_shared<TrialSetup>();
        setup->coarse = ra.desc.get();
        setup->coarse_g = ra.g.get();
        setup->goal = goal;
        setup->initial_truth = truth;
        setup->script = script;
        setup->action_model = ActionModel::noise_free();
        setup->label = "scenario_" + std::to_string(id) + "_seed_" + std::to_string(seed);
        // the briefing pins the robot's own state, book_2's location and
        // the door states; book_1's location follows from the carry axiom
        auto brief = [&](const std::string& atom, bool v) {
            setup->briefing.push_back({require_atom(g, atom), v, 0});
        };
        brief("loc(rob_1," + R0 + ")", true);
        brief("in_hand(rob_1,book_1)", true);
        brief("in_hand(rob_1,book_2)", false);
        brief("loc(book_2," + B2 + ")", true);
        for (const auto& p : rooms) brief("locked(" + p + ")", false);
        inst.setup = setup;
        return inst;
    }
    throw std::runtime_error("scenario sampler exhausted after 100 attempts");
}

LevelSpec level_spec(int id) {
    switch (id) {
        case 1: return {1, 2, 2, {1}};
        case 2: return {2, 3, 2, {2, 2}};
        case 3: return {3, 4, 4, {3, 3, 3}};
        case 4: return {4, 5, 5, {4, 4, 4, 4}};
        case 5: return {5, 5, 9, {2, 2, 2, 2, 2, 2, 2, 2}};
        case 6: return {6, 5, 12, {2, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1}};
        case 7: return {7, 5, 16, {2, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1}};
        case 8: return {8, 5, 16, {2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
                                   1, 1, 1, 1, 1, 1, 1, 1}};
        default: throw std::runtime_error("level id must be 1..8");
    }
}

namespace {

std::string pad2(int v) {
    char buf[8];
    snprintf(buf, sizeof(buf), "%02d", v);
    return buf;
}

std::string room_name(int i) { return "room_" + std::to_string(i + 1); }
std::string cell_name(int room, int c) { return room_name(room) + "_c" + pad2(c + 1); }
std::string obj_name(int i) { return "obj_" + pad2(i + 1); }

} // namespace

std::string level_domain_text(const LevelSpec& spec) {
    std::ostringstream os;
    os << "# generated task domain: " << spec.object_parts.size() << " objects, "
       << spec.rooms << " rooms, " << spec.cells_per_room << " cells per room\n\n";
    os << "sorts:\n  place = {";
    for (int r = 0; r < spec.rooms; ++r) os << (r ? ", " : "") << room_name(r);
    os << "}\n  robot = {rob_1}\n  object = {";
    for (std::size_t o = 0; o < spec.object_parts.size(); ++o)
        os << (o ? ", " : "") << obj_name((int)o);
    os << "}\n  thing = object + robot\n\n";
    os << "statics:\n  next_to(place, place)\n\n";
    os << "fluents basic:\n  loc(thing, place)\n  in_hand(robot, object)\n\n";
    os << "fluents defined:\n  somewhere(thing)\n\n";
    os << "actions agent:\n  move(robot, place)\n  pickup(robot, object)\n"
          "  putdown(robot, object)\n\n";
    os << "actions exogenous:\n  exo_move(object, place)\n\n";
    os << "axioms:\n"
          "  move(R, P) causes loc(R, P)\n"
          "  pickup(R, O) causes in_hand(R, O)\n"
          "  putdown(R, O) causes -in_hand(R, O)\n"
          "  exo_move(O, P) causes loc(O, P)\n"
          "  -loc(T, P2) if loc(T, P1), P1 != P2\n"
          "  loc(O, P) if loc(R, P), in_hand(R, O)\n"
          "  next_to(P1, P2) if next_to(P2, P1)\n"
          "  somewhere(T) if loc(T, P)\n"
          "  never -somewhere(T)\n"
          "  impossible move(R, P) if loc(R, P)\n"
          "  impossible move(R, P2) if loc(R, P1), -next_to(P1, P2)\n"
          "  impossible pickup(R, O) if loc(R, P1), loc(O, P2), P1 != P2\n"
          "  impossible pickup(R, O) if in_hand(R, O2)\n"
          "  impossible putdown(R, O) if -in_hand(R, O)\n"
          "  impossible exo_move(O, P) if loc(O, P)\n"
          "  impossible exo_move(O, P) if in_hand(R, O)\n\n";
    os << "defaults:\n  1: loc(X, room_1) if object(X)\n\n";
    os << "facts:\n";
    for (int r = 0; r + 1 < spec.rooms; ++r)
        os << "  next_to(" << room_name(r) << ", " << room_name(r + 1) << ")\n";
    os << "\nrefinement:\n";
    os << "  counterpart place = place* {\n";
    for (int r = 0; r < spec.rooms; ++r) {
        os << "    " << room_name(r) << " = {";
        for (int c = 0; c < spec.cells_per_room; ++c)
            os << (c ? ", " : "") << cell_name(r, c);
        os << "}\n";
    }
    os << "  }\n";
    bool any_magnified = false;
    for (int parts : spec.object_parts)
        if (parts > 1) any_magnified = true;
    if (any_magnified) {
        os << "  counterpart object = object* {\n";
        for (std::size_t o = 0; o < spec.object_parts.size(); ++o) {
            if (spec.object_parts[o] <= 1) continue;
            os << "    " << obj_name((int)o) << " = {";
            for (int p = 0; p < spec.object_parts[o]; ++p)
                os << (p ? ", " : "") << obj_name((int)o) << "_p" << (p + 1);
            os << "}\n";
        }
        os << "  }\n";
    }
    // cells form a corridor within each room; doors join room ends
    for (int r = 0; r < spec.rooms; ++r)
        for (int c = 0; c + 1 < spec.cells_per_room; ++c)
            os << "  fact next_to*(" << cell_name(r, c) << ", " << cell_name(r, c + 1) << ")\n";
    for (int r = 0; r + 1 < spec.rooms; ++r)
        os << "  fact next_to*(" << cell_name(r, spec.cells_per_room - 1) << ", "
           << cell_name(r + 1, 0) << ")\n";
    return os.str();
}

namespace {

struct LevelShared {
    std::shared_ptr<const SystemDescription> coarse;
    std::shared_ptr<const GroundedDescription> coarse_g;
    std::shared_ptr<const FineDescription> fine;
    std::shared_ptr<const GroundedDescription> fine_g;
};

const LevelShared& level_shared(int id) {
    static std::mutex mu;
    static std::map<int, LevelShared> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    LevelShared s;
    auto spec = level_spec(id);
    auto desc = std::make_shared<SystemDescription>(
        parse_domain_or_throw(level_domain_text(spec), "level_" + std::to_string(id)));
    s.coarse = desc;
    s.coarse_g = std::make_shared<GroundedDescription>(ground(*desc));
    auto fine = std::make_shared<FineDescription>(refine(*desc, DomainProfile{}));
    s.fine = fine;
    s.fine_g = std::make_shared<GroundedDescription>(ground(fine->desc));
    return cache.emplace(id, std::move(s)).first->second;
}

} // namespace

LevelInstance generate_level(int id, uint64_t seed) {
    const LevelShared& shared = level_shared(id);
    const LevelSpec spec = level_spec(id);
    const GroundedDescription& fg = *shared.fine_g;
    const GroundedDescription& cg = *shared.coarse_g;
    std::mt19937_64 rng(derive_seed(seed, 200 + id, 0));

    for (int attempt = 0; attempt < 100; ++attempt) {
        int goal_room = (int)(rng() % spec.rooms);
        int target_room = (int)(rng() % spec.rooms);
        if (target_room == goal_room) continue;
        int robot_room = (int)(rng() % spec.rooms);
        int robot_cell = (int)(rng() % spec.cells_per_room);

        // ground-truth placement at fine resolution
        PartialState p((int)fg.atom_count());
        auto place_thing = [&](const std::string& thing, const std::string& cell) {
            int loc_star = fg.sig().attr_id("loc*");
            const auto& at = fg.sig().attr(loc_star);
            int tid = fg.sig().constant_id(thing);
            for (int c : fg.sig().members(at.arg_sorts[1])) {
                int atom = fg.atom_id(loc_star, {tid, c});
                if (atom >= 0) p.assign(atom, fg.sig().constant_name(c) == cell);
            }
        };
        place_thing("rob_1", cell_name(robot_room, robot_cell));
        std::vector<int> obj_rooms(spec.object_parts.size());
        for (std::size_t o = 0; o < spec.object_parts.size(); ++o) {
            obj_rooms[o] = o == 0 ? target_room : (int)(rng() % spec.rooms);
            int cell = (int)(rng() % spec.cells_per_room);
            std::string cn = cell_name(obj_rooms[o], cell);
            if (spec.object_parts[o] > 1) {
                for (int part = 1; part <= spec.object_parts[o]; ++part)
                    place_thing(obj_name((int)o) + "_p" + std::to_string(part), cn);
            } else {
                place_thing(obj_name((int)o), cn);
            }
        }
        for (int atom : fg.basic_atoms())
            if (!p.known.test(atom)) p.assign(atom, false);
        auto truth_r = complete_state(p, fg);
        if (!std::holds_alternative<State>(truth_r)) continue;

        LevelInstance inst;
        inst.coarse = shared.coarse;
        inst.coarse_g = shared.coarse_g;
        inst.fine = shared.fine;
        inst.fine_g = shared.fine_g;
        inst.level = id;
        inst.seed = seed;
        auto setup = std::make_shared<TrialSetup>();
        setup->coarse = shared.coarse.get();
        setup->coarse_g = shared.coarse_g.get();
        setup->fine = shared.fine.get();
        setup->fine_g = shared.fine_g.get();
        setup->goal.literals.push_back(
            {require_atom(cg, "loc(" + obj_name(0) + "," + room_name(goal_room) + ")"), true});
        setup->goal.literals.push_back(
            {require_atom(cg, "in_hand(rob_1," + obj_name(0) + ")"), false});
        setup->initial_truth = std::get<State>(truth_r);
        setup->action_model = ActionModel::noise_free();
        setup->label = "level_" + std::to_string(id) + "_seed_" + std::to_string(seed);
        setup->briefing.push_back(
            {require_atom(cg, "loc(rob_1," + room_name(robot_room) + ")"), true, 0});
        for (std::size_t o = 0; o < spec.object_parts.size(); ++o)
            setup->briefing.push_back(
                {require_atom(cg, "in_hand(rob_1," + obj_name((int)o) + ")"), false, 0});
        inst.setup = setup;
        return inst;
    }
    throw std::runtime_error("level sampler exhausted after 100 attempts");
}

// ---------------------------------------------------------------------------
// experiments

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir + "/" + name);
    out << content;
}

void write_trace(const ExperimentOptions& opts, const std::string& name,
                 const std::string& trace) {
    if (opts.out_dir.empty() || !opts.write_traces) return;
    std::filesystem::create_directories(opts.out_dir + "/traces");
    std::ofstream out(opts.out_dir + "/traces/" + name);
    out << trace;
}

} // namespace

H1H2Report run_h1h2(const ExperimentOptions& opts) {
    H1H2Report rep;
    std::mutex mu;

    struct Task {
        int scenario;
        int index;
    };
    std::vector<Task> tasks;
    for (int s = 1; s <= 5; ++s)
        for (int i = 0; i < opts.trials; ++i) tasks.push_back({s, i});

    parallel_for((int)tasks.size(), opts.jobs, [&](int ti) {
        const Task& t = tasks[ti];
        uint64_t seed = derive_seed(opts.seed, t.scenario, t.index);
        auto inst = generate_scenario(t.scenario, seed);

        ControllerConfig ati;
        ati.mode = ControllerConfig::Mode::ATI;
        ati.seed = seed;
        ControllerConfig tp = ati;
        tp.mode = ControllerConfig::Mode::TP;

        auto [ra, rtp] = std::pair(run_goal(*inst.setup, ati), run_goal(*inst.setup, tp));

        write_trace(opts, "s" + std::to_string(t.scenario) + "_" + std::to_string(seed) +
                              "_ati.log", ra.trace);
        write_trace(opts, "s" + std::to_string(t.scenario) + "_" + std::to_string(seed) +
                              "_tp.log", rtp.trace);

        std::lock_guard<std::mutex> lock(mu);
        PairAggregate& agg = rep.by_scenario[t.scenario];
        ++agg.n;
        if (ra.goal_achieved) ++agg.acc_ati;
        if (rtp.goal_achieved) ++agg.acc_tp;
        auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
        agg.ratio_plans.push_back(ratio(rtp.plans_computed, ra.plans_computed));
        agg.ratio_plan_time.push_back(ratio(rtp.planning_time, ra.planning_time));
        agg.ratio_exec_time.push_back(ratio(rtp.execution_time, ra.execution_time));
        agg.ratio_actions.push_back(ratio(rtp.actions_executed, ra.actions_executed));
        agg.ratio_total.push_back(0.5 * (ratio(rtp.planning_time, ra.planning_time) +
                                         ratio(rtp.execution_time, ra.execution_time)));
        agg.ati.push_back(std::move(ra));
        agg.tp.push_back(std::move(rtp));
    });

    // ---- gates ----
    auto& s = rep.by_scenario;
    {
        const auto& a5 = s[5];
        rep.gate_s5_dichotomy = a5.n >= 1 && a5.acc_tp == 0 && a5.acc_ati == a5.n;
    }
    {
        bool ati_all = true;
        for (int id : {3, 4, 5})
            if (s[id].acc_ati != s[id].n) ati_all = false;
        bool tp_below = s[3].acc_tp < s[3].n && s[4].acc_tp < s[4].n;
        bool sig = true;
        for (int id : {3, 4}) {
            int wins = 0, n = 0;
            for (int i = 0; i < s[id].n; ++i) {
                bool aw = s[id].ati[i].goal_achieved, tw = s[id].tp[i].goal_achieved;
                if (aw != tw) {
                    ++n;
                    if (aw) ++wins;
                }
            }
            if (sign_test_p(wins, n) >= 0.05) sig = false;
        }
        rep.gate_s34_direction = ati_all && tp_below && sig;
    }
    {
        const auto& a1 = s[1];
        bool acc = a1.acc_ati == a1.n && a1.acc_tp == a1.n;
        bool lens = true;
        int faster = 0;
        for (int i = 0; i < a1.n; ++i) {
            if (a1.ati[i].first_plan_length != a1.tp[i].first_plan_length) lens = false;
            if (a1.tp[i].planning_time < a1.ati[i].planning_time) ++faster;
        }
        rep.gate_s1_overhead = acc && lens && a1.n > 0 && faster * 5 >= a1.n * 4;
    }
    {
        const auto& a2 = s[2];
        bool strict = a2.n > 0;
        for (int i = 0; i < a2.n; ++i) {
            if (!(a2.tp[i].actions_executed > a2.ati[i].actions_executed)) strict = false;
            if (!(a2.tp[i].execution_time > a2.ati[i].execution_time)) strict = false;
        }
        rep.gate_s2_efficiency = strict && mean(a2.ratio_actions) >= 1.5;
    }

    // ---- reports ----
    std::ostringstream csv, table;
    csv << "measure,scenario,ratio_mean,ratio_std,n,acc_tp,acc_ati\n";
    json j;
    auto emit = [&](const std::string& m, int sc, const std::vector<double>& v,
                    const PairAggregate& agg) {
        csv << m << "," << sc << "," << mean(v) << "," << stddev(v) << "," << agg.n << ","
            << (agg.n ? (double)agg.acc_tp / agg.n : 0.0) << ","
            << (agg.n ? (double)agg.acc_ati / agg.n : 0.0) << "\n";
        j["rows"].push_back({{"measure", m},
                             {"scenario", sc},
                             {"ratio_mean", mean(v)},
                             {"ratio_std", stddev(v)},
                             {"n", agg.n},
                             {"acc_tp", agg.n ? (double)agg.acc_tp / agg.n : 0.0},
                             {"acc_ati", agg.n ? (double)agg.acc_ati / agg.n : 0.0}});
    };
    table << "scenario  tot_time  #plans  plan_time  exec_time  #actions  acc_tp  acc_ati\n";
    for (auto& [sc, agg] : s) {
        emit("tot_time", sc, agg.ratio_total, agg);
        emit("plans", sc, agg.ratio_plans, agg);
        emit("plan_time", sc, agg.ratio_plan_time, agg);
        emit("exec_time", sc, agg.ratio_exec_time, agg);
        emit("actions", sc, agg.ratio_actions, agg);
        char line[256];
        snprintf(line, sizeof(line), "%8d  %8.2f  %6.2f  %9.2f  %9.2f  %8.2f  %5.0f%%  %6.0f%%\n",
                 sc, mean(agg.ratio_total), mean(agg.ratio_plans), mean(agg.ratio_plan_time),
                 mean(agg.ratio_exec_time), mean(agg.ratio_actions),
                 agg.n ? 100.0 * agg.acc_tp / agg.n : 0.0,
                 agg.n ? 100.0 * agg.acc_ati / agg.n : 0.0);
        table << line;
    }
    j["gates"] = {{"s5_dichotomy", rep.gate_s5_dichotomy},
                  {"s34_direction", rep.gate_s34_direction},
                  {"s1_overhead", rep.gate_s1_overhead},
                  {"s2_efficiency", rep.gate_s2_efficiency}};
    rep.csv = csv.str();
    rep.table = table.str();
    rep.json = j.dump(2);
    write_file(opts.out_dir, "h1h2.csv", rep.csv);
    write_file(opts.out_dir, "h1h2.json", rep.json);
    write_file(opts.out_dir, "h1h2.txt", rep.table);
    return rep;
}

H3Report run_h3(const ExperimentOptions& opts) {
    H3Report rep;
    std::mutex mu;

    // levels are heavy to build; prepare them serially before fanning out
    for (int l = 1; l <= 8; ++l) level_shared(l);

    struct Task {
        int level;
        int index;
        bool zoomed;
    };
    std::vector<Task> tasks;
    for (int l = 1; l <= 8; ++l) {
        for (int i = 0; i < opts.level_trials; ++i) tasks.push_back({l, i, true});
        int nz = l <= 3 ? opts.level_trials : opts.level_nozoom_trials;
        for (int i = 0; i < nz; ++i) tasks.push_back({l, i, false});
    }

    parallel_for((int)tasks.size(), opts.jobs, [&](int ti) {
        const Task& t = tasks[ti];
        uint64_t seed = derive_seed(opts.seed, 300 + t.level, t.index);
        auto inst = generate_level(t.level, seed);

        ControllerConfig cfg;
        cfg.mode = ControllerConfig::Mode::ATI;
        cfg.fine_resolution = true;
        cfg.zooming = t.zoomed;
        cfg.fine_plan_timeout_s = opts.fine_plan_timeout_s;
        cfg.seed = seed;
        auto r = run_goal(*inst.setup, cfg);

        write_trace(opts, "l" + std::to_string(t.level) + "_" + std::to_string(seed) +
                              (t.zoomed ? "_zoom.log" : "_nozoom.log"), r.trace);

        std::lock_guard<std::mutex> lock(mu);
        LevelAggregate& agg = rep.by_level[t.level];
        bool done = r.completed && r.goal_achieved;
        if (t.zoomed) {
            ++agg.n_zoom;
            if (done) {
                ++agg.completed_zoom;
                ++agg.achieved_zoom;
                agg.fine_time_zoom.push_back(r.fine_reasoning_time);
                agg.coarse_time_zoom.push_back(r.coarse_reasoning_time);
                agg.total_time_zoom.push_back(r.planning_time);
                if (r.fine_plans_computed > 0)
                    agg.per_plan_zoom.push_back(r.fine_reasoning_time / r.fine_plans_computed);
            }
        } else {
            ++agg.n_nozoom;
            if (done) {
                ++agg.completed_nozoom;
                agg.fine_time_nozoom.push_back(r.fine_reasoning_time);
                agg.coarse_time_nozoom.push_back(r.coarse_reasoning_time);
                if (r.fine_plans_computed > 0)
                    agg.per_plan_nozoom.push_back(r.fine_reasoning_time / r.fine_plans_computed);
            }
        }
    });

    // ---- gates ----
    {
        bool zoom_all = true, nz_ok = true;
        for (int l = 1; l <= 8; ++l) {
            auto& a = rep.by_level[l];
            if (a.completed_zoom != a.n_zoom) zoom_all = false;
            if (l <= 2 && a.completed_nozoom != a.n_nozoom) nz_ok = false;
            if (l == 3 && !(a.completed_nozoom < a.n_nozoom)) nz_ok = false;
            if (l >= 4 && a.completed_nozoom != 0) nz_ok = false;
        }
        rep.gate_zoom_completion = zoom_all;
        rep.gate_nozoom_pattern = nz_ok;

        bool monotone = true;
        double prev = -1;
        for (int l = 1; l <= 8; ++l) {
            double m = median(rep.by_level[l].per_plan_zoom);
            if (prev > 0 && m < prev * 0.9) monotone = false;
            prev = std::max(prev, m);
        }
        double first = median(rep.by_level[1].per_plan_zoom);
        double last = median(rep.by_level[8].per_plan_zoom);
        rep.gate_per_plan_monotone = monotone && last > first;

        double f7 = mean(rep.by_level[7].fine_time_zoom);
        double f8 = mean(rep.by_level[8].fine_time_zoom);
        double c7 = mean(rep.by_level[7].coarse_time_zoom);
        double c8 = mean(rep.by_level[8].coarse_time_zoom);
        rep.gate_l7_l8 = f7 > 0 && std::abs(f8 - f7) <= 0.25 * f7 && c8 > c7;
    }

    // ---- reports ----
    std::ostringstream csv, table;
    csv << "measure,scenario,ratio_mean,ratio_std,n,acc_tp,acc_ati\n";
    json j;
    auto emit = [&](const std::string& m, int level, const std::vector<double>& v, int n,
                    double comp_nz, double comp_z) {
        csv << m << "," << level << "," << mean(v) << "," << stddev(v) << "," << n << ","
            << comp_nz << "," << comp_z << "\n";
        j["rows"].push_back({{"measure", m},
                             {"level", level},
                             {"mean", mean(v)},
                             {"std", stddev(v)},
                             {"n", n},
                             {"completion_nozoom", comp_nz},
                             {"completion_zoom", comp_z}});
    };
    table << "level  fine_zoom  coarse_zoom  per_plan_zoom  fine_nozoom  per_plan_nozoom"
             "  done_zoom  done_nozoom\n";
    for (auto& [l, a] : rep.by_level) {
        double cz = a.n_zoom ? (double)a.completed_zoom / a.n_zoom : 0;
        double cn = a.n_nozoom ? (double)a.completed_nozoom / a.n_nozoom : 0;
        emit("fine_time_zoom", l, a.fine_time_zoom, a.n_zoom, cn, cz);
        emit("coarse_time_zoom", l, a.coarse_time_zoom, a.n_zoom, cn, cz);
        emit("total_time_zoom", l, a.total_time_zoom, a.n_zoom, cn, cz);
        emit("per_refined_plan_zoom", l, a.per_plan_zoom, a.n_zoom, cn, cz);
        emit("fine_time_nozoom", l, a.fine_time_nozoom, a.n_nozoom, cn, cz);
        emit("per_refined_plan_nozoom", l, a.per_plan_nozoom, a.n_nozoom, cn, cz);
        char line[256];
        snprintf(line, sizeof(line),
                 "%5d  %9.3f  %11.3f  %13.4f  %11.3f  %15.4f  %8.0f%%  %10.0f%%\n", l,
                 mean(a.fine_time_zoom), mean(a.coarse_time_zoom), median(a.per_plan_zoom),
                 mean(a.fine_time_nozoom), median(a.per_plan_nozoom), 100 * cz, 100 * cn);
        table << line;
    }
    j["gates"] = {{"zoom_completion", rep.gate_zoom_completion},
                  {"nozoom_pattern", rep.gate_nozoom_pattern},
                  {"per_plan_monotone", rep.gate_per_plan_monotone},
                  {"l7_l8", rep.gate_l7_l8}};
    rep.csv = csv.str();
    rep.table = table.str();
    rep.json = j.dump(2);
    write_file(opts.out_dir, "h3.csv", rep.csv);
    write_file(opts.out_dir, "h3.json", rep.json);
    write_file(opts.out_dir, "h3.txt", rep.table);
    return rep;
}

} // namespace resolute
