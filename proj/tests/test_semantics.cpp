#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "resolute/bench.hpp"
#include "resolute/parser.hpp"

#include <random>
#include <set>

using namespace resolute;

namespace {

const char* kMini =
    "sorts:\n"
    "  place = {a, b}\n"
    "  robot = {rob_1}\n"
    "  book = {book_1}\n"
    "  object = book\n"
    "  thing = object + robot\n"
    "statics:\n"
    "  next_to(place, place)\n"
    "fluents basic:\n"
    "  loc(thing, place)\n"
    "  in_hand(robot, object)\n"
    "fluents defined:\n"
    "  somewhere(thing)\n"
    "actions agent:\n"
    "  move(robot, place)\n"
    "  pickup(robot, object)\n"
    "  putdown(robot, object)\n"
    "actions exogenous:\n"
    "  exo_move(object, place)\n"
    "axioms:\n"
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
    "  impossible exo_move(O, P) if in_hand(R, O)\n"
    "facts:\n"
    "  next_to(a, b)\n";

GroundedDescription mini() { return ground(parse_domain_or_throw(kMini, "mini")); }

GroundedDescription ra() {
    return ground(parse_domain_or_throw(ra_domain_source(), "ra"));
}

// Brute-force transition oracle: a successor is a legal state satisfying
// the direct effects in which every non-effect basic change is supported
// by a state constraint firing in the result.
std::optional<State> successor_oracle(const State& s, int action, const GroundedDescription& g,
                                      bool* inexecutable) {
    *inexecutable = false;
    for (int idx : g.exec_for(action))
        if (body_holds(g.axioms()[idx].body, s.values)) {
            *inexecutable = true;
            return std::nullopt;
        }
    std::vector<GroundLit> effects;
    std::set<int> effect_atoms;
    for (int idx : g.causal_for(action)) {
        const auto& ax = g.axioms()[idx];
        if (body_holds(ax.body, s.values)) {
            effects.push_back(ax.head);
            effect_atoms.insert(ax.head.atom);
        }
    }
    std::vector<State> matches;
    for (const State& cand : legal_states(g)) {
        bool ok = true;
        for (const auto& e : effects)
            if (!cand.holds(e)) ok = false;
        for (int x : g.basic_atoms()) {
            if (!ok) break;
            if (cand.holds(x) == s.holds(x) || effect_atoms.count(x)) continue;
            bool supported = false;
            for (int idx : g.basic_head_constraints()) {
                const auto& ax = g.axioms()[idx];
                if (ax.head.atom == x && ax.head.positive == cand.holds(x) &&
                    body_holds(ax.body, cand.values))
                    supported = true;
            }
            if (!supported) ok = false;
        }
        if (ok) matches.push_back(cand);
    }
    if (matches.size() != 1) return std::nullopt;
    return matches[0];
}

} // namespace

TEST_CASE("completion derives a held object's location") {
    auto g = ra();
    PartialState p(g.atom_count());
    auto assign = [&](const std::string& name, bool v) { p.assign(g.atom_by_name(name), v); };
    for (const char* room : {"kitchen", "library", "office_1", "office_2"}) {
        assign(std::string("loc(rob_1,") + room + ")", std::string(room) == "kitchen");
        assign(std::string("loc(book_2,") + room + ")", std::string(room) == "library");
        assign(std::string("locked(") + room + ")", false);
    }
    assign("in_hand(rob_1,book_1)", true);
    assign("in_hand(rob_1,book_2)", false);
    // book_1's location left open: the carry constraint must close it
    auto r = complete_state(p, g);
    REQUIRE(std::holds_alternative<State>(r));
    const State& st = std::get<State>(r);
    CHECK(st.holds(g.atom_by_name("loc(book_1,kitchen)")));
    CHECK(!st.holds(g.atom_by_name("loc(book_1,library)")));
    CHECK(st.holds(g.atom_by_name("somewhere(book_1)")));
}

TEST_CASE("a closed partial completes to itself") {
    auto g = mini();
    for (const State& s : legal_states(g)) {
        PartialState p(g.atom_count());
        for (int a : g.basic_atoms()) p.assign(a, s.holds(a));
        auto r = complete_state(p, g);
        REQUIRE(std::holds_alternative<State>(r));
        CHECK(std::get<State>(r) == s);
    }
}

TEST_CASE("defined fixpoint matches a naive iterate-until-stable oracle") {
    auto g = mini();
    for (const State& s : legal_states(g)) {
        // naive recomputation: full passes until nothing changes
        Bitset naive = s.values;
        for (int d : g.defined_atoms()) naive.set(d, false);
        bool changed = true;
        while (changed) {
            changed = false;
            for (int idx : g.defined_head_constraints()) {
                const auto& ax = g.axioms()[idx];
                if (!naive.test(ax.head.atom) && body_holds(ax.body, naive)) {
                    naive.set(ax.head.atom, true);
                    changed = true;
                }
            }
        }
        Bitset mine = s.values;
        recompute_defined(mine, g);
        CHECK(mine == naive);
    }
}

TEST_CASE("move updates the location and leaves the rest inertial") {
    auto g = ra();
    PartialState p(g.atom_count());
    auto assign = [&](const std::string& name, bool v) { p.assign(g.atom_by_name(name), v); };
    for (const char* room : {"kitchen", "library", "office_1", "office_2"}) {
        assign(std::string("loc(rob_1,") + room + ")", std::string(room) == "kitchen");
        assign(std::string("loc(book_1,") + room + ")", std::string(room) == "kitchen");
        assign(std::string("loc(book_2,") + room + ")", std::string(room) == "office_2");
        assign(std::string("locked(") + room + ")", false);
    }
    assign("in_hand(rob_1,book_1)", false);
    assign("in_hand(rob_1,book_2)", false);
    State s = std::get<State>(complete_state(p, g));

    auto r = successor(s, g.action_by_name("move(rob_1,library)"), g);
    REQUIRE(std::holds_alternative<State>(r));
    const State& t = std::get<State>(r);
    CHECK(t.holds(g.atom_by_name("loc(rob_1,library)")));
    CHECK(!t.holds(g.atom_by_name("loc(rob_1,kitchen)")));
    // books do not move on their own
    CHECK(t.holds(g.atom_by_name("loc(book_1,kitchen)")));
    CHECK(t.holds(g.atom_by_name("loc(book_2,office_2)")));
}

TEST_CASE("picking up a remote object is inexecutable") {
    auto g = ra();
    PartialState p(g.atom_count());
    auto assign = [&](const std::string& name, bool v) { p.assign(g.atom_by_name(name), v); };
    for (const char* room : {"kitchen", "library", "office_1", "office_2"}) {
        assign(std::string("loc(rob_1,") + room + ")", std::string(room) == "kitchen");
        assign(std::string("loc(book_1,") + room + ")", std::string(room) == "kitchen");
        assign(std::string("loc(book_2,") + room + ")", std::string(room) == "office_2");
        assign(std::string("locked(") + room + ")", false);
    }
    assign("in_hand(rob_1,book_1)", false);
    assign("in_hand(rob_1,book_2)", false);
    State s = std::get<State>(complete_state(p, g));

    auto r = successor(s, g.action_by_name("pickup(rob_1,book_2)"), g);
    CHECK(std::holds_alternative<Inexecutable>(r));
    auto r2 = successor(s, g.action_by_name("pickup(rob_1,book_1)"), g);
    CHECK(std::holds_alternative<State>(r2));
}

TEST_CASE("exhaustive successor equivalence on the two-room domain") {
    auto g = mini();
    auto states = legal_states(g);
    REQUIRE(!states.empty());
    int checked = 0;
    for (const State& s : states) {
        for (int a : g.agent_actions()) {
            bool oracle_inexec = false;
            auto expected = successor_oracle(s, a, g, &oracle_inexec);
            auto actual = successor(s, a, g);
            if (oracle_inexec) {
                CHECK(std::holds_alternative<Inexecutable>(actual));
            } else {
                REQUIRE_MESSAGE(expected.has_value(),
                                "oracle must be deterministic for ", g.action_name(a));
                REQUIRE(std::holds_alternative<State>(actual));
                CHECK(std::get<State>(actual) == *expected);
            }
            ++checked;
        }
        for (int a : g.exo_actions()) {
            bool oracle_inexec = false;
            auto expected = successor_oracle(s, a, g, &oracle_inexec);
            auto actual = successor(s, a, g);
            if (oracle_inexec) CHECK(std::holds_alternative<Inexecutable>(actual));
            else CHECK(std::get<State>(actual) == *expected);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("legal state counts") {
    SUBCASE("one robot, two places, no objects") {
        auto g = ground(parse_domain_or_throw(
            "sorts:\n"
            "  place = {a, b}\n"
            "  robot = {rob_1}\n"
            "fluents basic:\n"
            "  loc(robot, place)\n"
            "fluents defined:\n"
            "  somewhere(robot)\n"
            "actions agent:\n"
            "  move(robot, place)\n"
            "axioms:\n"
            "  move(R, P) causes loc(R, P)\n"
            "  -loc(R, P2) if loc(R, P1), P1 != P2\n"
            "  somewhere(R) if loc(R, P)\n"
            "  never -somewhere(R)\n",
            "tiny"));
        CHECK(legal_states(g).size() == 2);
    }
    SUBCASE("contradictory constraints yield no states") {
        auto g = ground(parse_domain_or_throw(
            "sorts:\n"
            "  robot = {rob_1}\n"
            "fluents basic:\n"
            "  happy(robot)\n"
            "actions agent:\n"
            "  wave(robot)\n"
            "axioms:\n"
            "  never happy(R)\n"
            "  never -happy(R)\n",
            "contra"));
        CHECK(legal_states(g).empty());
    }
    SUBCASE("one book and two rooms match the combinatorial count") {
        auto g = mini();
        // robot position (2) x (book held (1) + book free in either room (2))
        CHECK(legal_states(g).size() == 2 * 3);
    }
}

TEST_CASE("successors of legal states satisfy every constraint") {
    auto g = mini();
    for (const State& s : legal_states(g)) {
        for (int a : g.agent_actions()) {
            auto r = successor(s, a, g);
            if (!std::holds_alternative<State>(r)) continue;
            const State& t = std::get<State>(r);
            for (int idx : g.constraints()) {
                const auto& ax = g.axioms()[idx];
                if (body_holds(ax.body, t.values))
                    CHECK(t.values.test(ax.head.atom) == ax.head.positive);
            }
            for (int idx : g.never_constraints())
                CHECK(!body_holds(g.axioms()[idx].body, t.values));
        }
    }
}

TEST_CASE("inertia holds for atoms outside triggered causal heads") {
    auto g = mini();
    for (const State& s : legal_states(g)) {
        for (int a : g.agent_actions()) {
            auto r = successor(s, a, g);
            if (!std::holds_alternative<State>(r)) continue;
            const State& t = std::get<State>(r);
            std::set<int> heads;
            for (int idx : g.causal_for(a))
                if (body_holds(g.axioms()[idx].body, s.values))
                    heads.insert(g.axioms()[idx].head.atom);
            for (int x : g.basic_atoms()) {
                if (heads.count(x) || t.holds(x) == s.holds(x)) continue;
                // flipped without being an effect: must be constraint-supported
                bool supported = false;
                for (int idx : g.basic_head_constraints()) {
                    const auto& ax = g.axioms()[idx];
                    if (ax.head.atom == x && ax.head.positive == t.holds(x) &&
                        body_holds(ax.body, t.values))
                        supported = true;
                }
                CHECK(supported);
            }
        }
    }
}
