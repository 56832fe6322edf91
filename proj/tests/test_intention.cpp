#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "resolute/bench.hpp"
#include "resolute/intention.hpp"
#include "resolute/parser.hpp"

using namespace resolute;

namespace {

struct Fixture {
    GroundedDescription g = ground(parse_domain_or_throw(ra_domain_source(), "ra"));
    Goal goal;
    History h;
    MentalState mental;

    Fixture() {
        goal.literals = {{g.atom_by_name("loc(book_1,library)"), true},
                         {g.atom_by_name("loc(book_2,library)"), true},
                         {g.atom_by_name("in_hand(rob_1,book_1)"), false},
                         {g.atom_by_name("in_hand(rob_1,book_2)"), false}};
        mental.active_goal = goal;
        auto obs = [&](const std::string& a, bool v) { h.observe(g.atom_by_name(a), v, 0); };
        obs("loc(rob_1,kitchen)", true);
        obs("in_hand(rob_1,book_1)", true);
        obs("in_hand(rob_1,book_2)", false);
        obs("loc(book_2,kitchen)", true);
        for (const char* p : {"kitchen", "library", "office_1", "office_2"})
            obs(std::string("locked(") + p + ")", false);
    }

    ModelOfHistory model() { return std::get<ModelOfHistory>(consistent_model(g, h)); }

    std::vector<int> scenario1_plan(const ModelOfHistory& m) {
        auto r = plan_minimal(g, m.final_state(), goal, 20);
        return std::get<Plan>(r).actions;
    }

    void act(const std::string& name, bool happened = true) {
        int a = g.action_by_name(name);
        h.attempt(a, h.current_step);
        h.set_verdict(a, h.current_step, happened);
        ++h.current_step;
    }
};

} // namespace

TEST_CASE("activity creation verifies plans and hands out fresh names") {
    Fixture f;
    auto m = f.model();
    auto plan = f.scenario1_plan(m);
    auto r1 = create_activity(f.mental, f.goal, plan, m, f.g);
    REQUIRE(std::holds_alternative<Activity>(r1));
    const Activity& a1 = std::get<Activity>(r1);
    CHECK(a1.length() == 6);

    auto r2 = create_activity(f.mental, f.goal, plan, m, f.g);
    CHECK(std::get<Activity>(r2).name != a1.name);

    // a plan that does not verify is rejected
    std::vector<int> bogus = {f.g.action_by_name("pickup(rob_1,book_2)")};
    auto r3 = create_activity(f.mental, f.goal, bogus, m, f.g);
    CHECK(std::holds_alternative<ActivityRejected>(r3));
}

TEST_CASE("an empty plan for a satisfied goal is immediately done") {
    Fixture f;
    // rearrange: both books already delivered
    Fixture done;
    done.h = History{};
    auto obs = [&](const std::string& a, bool v) {
        done.h.observe(done.g.atom_by_name(a), v, 0);
    };
    obs("loc(rob_1,library)", true);
    obs("in_hand(rob_1,book_1)", false);
    obs("in_hand(rob_1,book_2)", false);
    obs("loc(book_1,library)", true);
    obs("loc(book_2,library)", true);
    for (const char* p : {"kitchen", "library", "office_1", "office_2"})
        obs(std::string("locked(") + p + ")", false);
    auto m = done.model();
    auto r = create_activity(done.mental, done.goal, {}, m, done.g);
    REQUIRE(std::holds_alternative<Activity>(r));
    CHECK(std::get<Activity>(r).length() == 0);
    start_activity(done.mental, std::get<Activity>(r).name);
    auto ia = next_intended_action(done.mental, m, done.g);
    CHECK(ia.kind == IntendedAction::Kind::Done);
}

TEST_CASE("projected success tracks the remaining components") {
    Fixture f;
    auto m = f.model();
    auto plan = f.scenario1_plan(m);
    auto act = std::get<Activity>(create_activity(f.mental, f.goal, plan, m, f.g));

    SUBCASE("mid-plan with no surprises") {
        f.act("move(rob_1,library)");
        f.act("putdown(rob_1,book_1)");
        auto m2 = f.model();
        CHECK(projected_success(act, 2, m2, f.g));
    }
    SUBCASE("a vanished book defeats the remainder") {
        f.act("move(rob_1,library)");
        // book_2 is no longer where the plan expects it
        f.h.observe(f.g.atom_by_name("loc(book_2,kitchen)"), false, 1);
        auto m2 = f.model();
        CHECK(!projected_success(act, 1, m2, f.g));
    }
    SUBCASE("a finished activity with its goal satisfied projects success") {
        Activity trivial;
        trivial.name = 99;
        trivial.goal.literals = {{f.g.atom_by_name("loc(book_2,kitchen)"), true}};
        auto m2 = f.model();
        CHECK(projected_success(trivial, 0, m2, f.g));
    }
}

TEST_CASE("next intended action selection") {
    Fixture f;
    auto m = f.model();

    SUBCASE("no active activity asks for a plan") {
        auto ia = next_intended_action(f.mental, m, f.g);
        CHECK(ia.kind == IntendedAction::Kind::Replan);
    }
    SUBCASE("an active activity with projected success yields its next component") {
        auto plan = f.scenario1_plan(m);
        auto act = std::get<Activity>(create_activity(f.mental, f.goal, plan, m, f.g));
        start_activity(f.mental, act.name);
        auto ia = next_intended_action(f.mental, m, f.g);
        REQUIRE(ia.kind == IntendedAction::Kind::Agent);
        CHECK(f.g.action_name(ia.action) == "move(rob_1,library)");
    }
    SUBCASE("goal satisfied in the model means done, even mid-activity") {
        auto plan = f.scenario1_plan(m);
        auto act = std::get<Activity>(create_activity(f.mental, f.goal, plan, m, f.g));
        start_activity(f.mental, act.name);
        f.act("move(rob_1,library)");
        f.act("putdown(rob_1,book_1)");
        f.h.observe(f.g.atom_by_name("loc(book_2,library)"), true, 2);
        auto m2 = f.model();
        auto ia = next_intended_action(f.mental, m2, f.g);
        CHECK(ia.kind == IntendedAction::Kind::Done);
    }
    SUBCASE("a futile activity is stopped") {
        auto plan = f.scenario1_plan(m);
        auto act = std::get<Activity>(create_activity(f.mental, f.goal, plan, m, f.g));
        start_activity(f.mental, act.name);
        f.act("move(rob_1,library)");
        advance(f.mental, AttemptRec::Verdict::Happened);
        f.h.observe(f.g.atom_by_name("loc(book_2,kitchen)"), false, 1);
        auto m2 = f.model();
        auto ia = next_intended_action(f.mental, m2, f.g);
        REQUIRE(ia.kind == IntendedAction::Kind::Stop);
        CHECK(ia.activity_name == act.name);
        // after stopping, the controller replans
        stop_activity(f.mental);
        auto ia2 = next_intended_action(f.mental, m2, f.g);
        CHECK(ia2.kind == IntendedAction::Kind::Replan);
    }
}

TEST_CASE("advance moves the index only on success") {
    Fixture f;
    f.mental.current_action_index = 0;
    f.mental.active_activity = 1;
    advance(f.mental, AttemptRec::Verdict::Happened);
    CHECK(f.mental.current_action_index == 1);
    advance(f.mental, AttemptRec::Verdict::NotHappened);
    CHECK(f.mental.current_action_index == 1);
}

TEST_CASE("persistence: done is never reported while the goal is unsatisfied") {
    Fixture f;
    auto m = f.model();
    auto plan = f.scenario1_plan(m);
    auto act = std::get<Activity>(create_activity(f.mental, f.goal, plan, m, f.g));
    start_activity(f.mental, act.name);

    // walk the whole activity but let the world sabotage the outcome
    for (std::size_t i = 0; i < plan.size(); ++i) {
        f.act(f.g.action_name(plan[i]));
        advance(f.mental, AttemptRec::Verdict::Happened);
    }
    // book_1 disappeared right at the end
    f.h.observe(f.g.atom_by_name("loc(book_1,library)"), false, (int)plan.size());
    auto m2 = f.model();
    CHECK(!goal_achieved(m2, f.goal));
    auto ia = next_intended_action(f.mental, m2, f.g);
    // completed but failed: stop and replan, never Done
    CHECK(ia.kind == IntendedAction::Kind::Stop);
}

TEST_CASE("futility dichotomy for active activities") {
    Fixture f;
    auto m = f.model();
    auto plan = f.scenario1_plan(m);
    auto act = std::get<Activity>(create_activity(f.mental, f.goal, plan, m, f.g));
    start_activity(f.mental, act.name);
    for (int idx : {0, 1, 2}) {
        bool proj = projected_success(act, idx, m, f.g);
        auto ia = next_intended_action(f.mental, m, f.g);
        bool futile = ia.kind == IntendedAction::Kind::Stop;
        bool agent = ia.kind == IntendedAction::Kind::Agent;
        CHECK(proj == agent);
        CHECK(proj != futile);
        advance(f.mental, AttemptRec::Verdict::Happened);
        f.act(f.g.action_name(plan[idx]));
        m = f.model();
    }
}
