#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "rbcm/constructions.hpp"
#include "rbcm/decide.hpp"

using namespace rbcm;

namespace {

StateId state_named(const CounterMachine& m, const std::string& n)
{
    auto it = std::find(m.states.begin(), m.states.end(), n);
    REQUIRE(it != m.states.end());
    return static_cast<StateId>(it - m.states.begin());
}

std::vector<std::string> oracle_words(const CounterMachine& m, std::size_t n)
{
    std::vector<std::string> out;
    for (const auto& w : testkit::words_upto(std::string(m.alphabet), n)) {
        if (testkit::oracle_accepts(m, w)) {
            out.push_back(w);
        }
    }
    return out;
}

const char* kIncOnly = "machine inc\nkind dcm\ncounters 1\nalphabet a\nstates s\ninitial s\nfinal s\n"
                       "trans s a * -> s R +1\n";

} // namespace

TEST_CASE("is_empty")
{
    const CounterMachine ab = corpus_machine("M_ab");
    EmptinessResult r = is_empty(ab);
    CHECK_FALSE(r.empty);
    REQUIRE(r.witness);
    CHECK(run_deterministic(ab, *r.witness).verdict == Verdict::Accept);

    CHECK(is_empty(intersect_regular(ab, word_dfa("aab", "ab"))).empty);
    CHECK(is_empty(corpus_machine("empty")).empty);

    CounterMachine unreachable = ab;
    unreachable.add_state("lost", true);
    std::fill(unreachable.final_states.begin(), unreachable.final_states.end(), false);
    unreachable.final_states.back() = true;
    CHECK(is_empty(unreachable).empty);

    CounterMachine unbounded = ab;
    unbounded.reversal_bound = kUnbounded;
    CHECK_THROWS_AS(is_empty(unbounded), InfiniteBudget);
}

TEST_CASE("is_empty witnesses on random machines")
{
    std::mt19937 rng(31);
    for (int i = 0; i < 40; ++i) {
        CounterMachine m = testkit::random_machine(rng);
        EmptinessResult r = is_empty(m);
        if (r.empty) {
            CHECK(oracle_words(m, 6).empty());
        } else {
            REQUIRE(r.witness);
            CHECK(testkit::oracle_accepts(m, *r.witness));
        }
    }
}

TEST_CASE("member")
{
    const CounterMachine neq = corpus_machine("M_neq");
    CHECK(member(neq, "#a#"));
    CHECK_FALSE(member(neq, "#ab#"));
    CHECK_FALSE(member(corpus_machine("M_ab"), "ac"));
    // A nondeterministic machine goes through the emptiness route.
    CounterMachine infix = inverse_insertion_ncm(corpus_machine("M_ab1"), InsertionOp::Infix);
    CHECK_FALSE(infix.deterministic);
    CHECK(member(infix, "babb"));
    CHECK_FALSE(member(infix, "bba"));
}

TEST_CASE("enumerate_words")
{
    const CounterMachine ab = corpus_machine("M_ab");
    CHECK(enumerate_words(ab, 4) == std::vector<std::string>{"", "ab", "aabb"});
    CHECK(enumerate_words(corpus_machine("empty"), 5).empty());
    CHECK(enumerate_words(ab, 0) == std::vector<std::string>{""});
    CHECK(enumerate_words(corpus_machine("M_ab1"), 0).empty());

    std::mt19937 rng(32);
    for (int i = 0; i < 20; ++i) {
        CounterMachine m = testkit::random_machine(rng);
        auto par = enumerate_words(m, 6);
        CHECK(par == enumerate_words_serial(m, 6));
        CHECK(par == oracle_words(m, 6));
    }
    CHECK(all_words("ba", 2) == std::vector<std::string>{"", "a", "b", "aa", "ab", "ba", "bb"});
}

TEST_CASE("is_infinite")
{
    CHECK(is_infinite(corpus_machine("M_ab")));
    CHECK_FALSE(is_infinite(dfa_to_machine(word_dfa("ab", "ab"))));
    CHECK_FALSE(is_infinite(corpus_machine("empty")));
    CHECK(is_infinite(corpus_machine("mod_counter")));
    CHECK_FALSE(is_infinite(corpus_machine("pf_hash")));
}

TEST_CASE("compare")
{
    const CounterMachine ab = corpus_machine("M_ab");
    CHECK(compare(strip_end_marker_one_counter(ab), ab, CompareMode::Equal).holds);
    CHECK(compare(ab, corpus_machine("astar_bstar"), CompareMode::Subset).holds);
    CompareResult r = compare(corpus_machine("astar"), ab, CompareMode::Subset);
    CHECK_FALSE(r.holds);
    REQUIRE(r.counterexample);
    CHECK(testkit::oracle_accepts(corpus_machine("astar"), *r.counterexample));
    CHECK_FALSE(testkit::oracle_accepts(ab, *r.counterexample));
    CHECK(*r.counterexample == "a");

    CompareResult eq = compare(ab, corpus_machine("M_ab1"), CompareMode::Equal);
    CHECK_FALSE(eq.holds);
    REQUIRE(eq.counterexample);
    CHECK(*eq.counterexample == "");

    CHECK_THROWS_AS(compare(ab, corpus_machine("stay_loop"), CompareMode::Subset), PreconditionViolated);
}

TEST_CASE("prefix_free_check_machine")
{
    CHECK_FALSE(prefix_free_check_machine(corpus_machine("M_ab")));
    CHECK(prefix_free_check_machine(corpus_machine("M_ab1")));
    CHECK(prefix_free_check_machine(corpus_machine("pf_hash")));
    CHECK_FALSE(prefix_free_check_machine(corpus_machine("hash_astar")));
    CHECK(testkit::brute_prefix_free(enumerate_words(corpus_machine("M_ab1"), 10)));
}

TEST_CASE("end_marker_behavior")
{
    const CounterMachine ab = enforce_reversal_control(corpus_machine("M_ab"));
    // Budget-explicit copies keep the original names as prefixes; take the
    // first copy of each.
    auto first_copy = [&](const std::string& n) {
        for (StateId q = 0; q < ab.num_states(); ++q) {
            if (ab.states[q].rfind(n, 0) == 0) {
                return q;
            }
        }
        FAIL("no copy of " << n);
        return StateId{0};
    };
    UnaryDfa s1 = end_marker_behavior(ab, first_copy("s1"));
    for (std::size_t i = 0; i <= 10; ++i) {
        CHECK(s1.accepts(i) == (i == 0));
    }
    UnaryDfa f = end_marker_behavior(ab, first_copy("f"));
    for (std::size_t i = 0; i <= 10; ++i) {
        CHECK(f.accepts(i));
    }
    const CounterMachine mod = enforce_reversal_control(corpus_machine("mod_counter"));
    // The copy of q0 reached after reading input has an upward budget.
    const StateId q0_up = step(mod, initial_configuration(mod), "a").front().state;
    CHECK(mod.states[q0_up].rfind("q0", 0) == 0);
    UnaryDfa q0 = end_marker_behavior(mod, q0_up);
    for (std::size_t i = 0; i <= 20; ++i) {
        CHECK(q0.accepts(i) == (i % 2 == 0));
    }
    CHECK_THROWS_AS(end_marker_behavior(enforce_reversal_control(corpus_machine("M_neq")), 0),
                    PreconditionViolated);
}

TEST_CASE("end_marker_behavior agrees with direct simulation")
{
    std::mt19937 rng(33);
    testkit::RandomOptions opt;
    opt.counters = 1;
    opt.marked = true;
    opt.stay_acyclic = false;
    opt.stay_rate = 0.5;
    for (int i = 0; i < 40; ++i) {
        opt.reversal_bound = 1 + i % 3;
        CounterMachine m = enforce_reversal_control(testkit::random_machine(rng, opt));
        for (StateId q = 0; q < m.num_states(); ++q) {
            UnaryDfa u = end_marker_behavior(m, q);
            const long long bound = static_cast<long long>(u.tail + 3 * u.loop + m.num_states()) + 8;
            for (long long v = 0; v <= bound; ++v) {
                CHECK(u.accepts(static_cast<std::size_t>(v)) == end_marker_accepts(m, q, v));
            }
        }
    }
}

TEST_CASE("to_one_reversal")
{
    const CounterMachine ab = enforce_reversal_control(corpus_machine("M_ab"));
    CounterMachine same = to_one_reversal(ab);
    CHECK(same.counters == ab.counters);
    CHECK(same.reversal_bound <= 1);

    // l=3, k=1: two sub-counters.
    CounterMachine twice = machine_from("machine t\nkind dcm\ncounters 1\nreversals 3\nalphabet a b\n"
                                        "states s t f\ninitial s\nfinal f\n"
                                        "trans s a * -> s R +1\ntrans s b p -> t R -1\ntrans t b p -> t R -1\n"
                                        "trans t a * -> s R +1\ntrans t $ z -> f S 0\n");
    CounterMachine split = to_one_reversal(enforce_reversal_control(twice));
    CHECK(split.counters == 2);
    CHECK(split.reversal_bound == 1);
    CHECK(first_oracle_mismatch(split, twice, 8) == "");
}

TEST_CASE("phase automaton and Parikh edges")
{
    // Two-edge chain: the only path uses each edge once.
    CounterMachine chain = dfa_to_machine(word_dfa("ab", "ab"));
    PhaseAutomaton pa = build_phase_automaton(chain);
    bool found_chain = false;
    for (std::size_t target : pa.accepting) {
        SemilinearSet s = parikh_edges(pa, target);
        for (const auto& c : s.components) {
            long long used = 0;
            for (long long v : c.base) {
                used += v;
            }
            found_chain = found_chain || (used == 2 && c.periods.empty());
        }
    }
    CHECK(found_chain);

    // Only increments: no Pdown or Z1 node is reachable.
    PhaseAutomaton inc = build_phase_automaton(enforce_reversal_control(machine_from(kIncOnly)));
    for (const auto& n : inc.nodes) {
        CHECK(n.modes[0] != CounterMode::Pdown);
        CHECK(n.modes[0] != CounterMode::Z1);
    }

    // M_ab: accepting nodes sit in Z0 or Z1.
    PhaseAutomaton pab = build_phase_automaton(enforce_reversal_control(corpus_machine("M_ab")));
    REQUIRE_FALSE(pab.accepting.empty());
    bool zero_end = std::any_of(pab.accepting.begin(), pab.accepting.end(), [&](std::size_t t) {
        return pab.nodes[t].modes[0] == CounterMode::Z0 || pab.nodes[t].modes[0] == CounterMode::Z1;
    });
    CHECK(zero_end);
}

TEST_CASE("parikh_image")
{
    SemilinearSet p = parikh_image(corpus_machine("M_ab"));
    for (long long x = 0; x <= 8; ++x) {
        for (long long y = 0; y <= 8; ++y) {
            CHECK(semilinear_member(p, {x, y}) == (x == y));
        }
    }
    SemilinearSet hash = parikh_image(corpus_machine("pf_hash"));
    CHECK(semilinear_member(hash, {1}));
    CHECK_FALSE(semilinear_member(hash, {0}));
    CHECK_FALSE(semilinear_member(hash, {2}));
    CHECK(parikh_image(corpus_machine("empty")).is_empty());

    std::mt19937 rng(34);
    for (int i = 0; i < 15; ++i) {
        CounterMachine m = testkit::random_machine(rng);
        SemilinearSet img = parikh_image(m);
        std::set<Vec> seen;
        for (const auto& w : oracle_words(m, 7)) {
            Vec v;
            for (char c : m.alphabet) {
                v.push_back(std::count(w.begin(), w.end(), c));
            }
            seen.insert(v);
        }
        for (const auto& w : testkit::words_upto(m.alphabet, 7)) {
            Vec v;
            for (char c : m.alphabet) {
                v.push_back(std::count(w.begin(), w.end(), c));
            }
            CHECK(semilinear_member(img, v) == (seen.count(v) != 0));
        }
    }
}
