#include <iostream>
#include <random>
#include <set>

#include "common.hpp"
#include "rbcm/semilinear.hpp"
#include "rbcm/transduce.hpp"

namespace acceptance {

using namespace rbcm;

Outcome criterion4()
{
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(4242);
    std::vector<CounterMachine> machines = corpus_machines();
    for (int i = 0; i < 200; ++i) {
        testkit::RandomOptions opt;
        opt.reversal_bound = i % 2;
        opt.stay_acyclic = i % 3 != 0;
        machines.push_back(testkit::random_machine(rng, opt));
    }
    int disagreements = 0;
    int bad_witness = 0;
    int empty_count = 0;
    std::string first;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        const CounterMachine& m = machines[i];
        EmptinessResult r = is_empty(m);
        auto words = enumerate_words(m, 10);
        if (r.empty) {
            ++empty_count;
            if (!words.empty()) {
                if (disagreements++ == 0) {
                    first = "machine " + std::to_string(i) + " reported empty but accepts \"" + words.front() + "\"";
                }
            }
        } else if (!r.witness || !member(m, *r.witness)) {
            if (bad_witness++ == 0) {
                first = "machine " + std::to_string(i) + " witness not accepted";
            }
        }
    }
    double secs = elapsed(start);
    std::ostringstream detail;
    detail << machines.size() << " machines (" << empty_count << " empty), " << disagreements
           << " disagreements, " << bad_witness << " bad witnesses, " << secs << " s";
    if (!first.empty()) {
        detail << " (first: " << first << ")";
    }
    return {disagreements == 0 && bad_witness == 0 && secs <= 600, detail.str()};
}

Outcome criterion5()
{
    const CounterMachine m = load_corpus("M_ab").file.machine;
    const SemilinearSet p = parikh_image(m);
    std::set<std::pair<long long, long long>> seen;
    for (const auto& w : enumerate_words(m, 12)) {
        seen.insert({std::count(w.begin(), w.end(), 'a'), std::count(w.begin(), w.end(), 'b')});
    }
    int mismatches = 0;
    for (long long x = 0; x <= 12; ++x) {
        for (long long y = 0; x + y <= 12; ++y) {
            bool in_set = semilinear_member(p, {x, y});
            bool enumerated = seen.count({x, y}) != 0;
            if (in_set != enumerated || in_set != (x == y)) {
                ++mismatches;
            }
        }
    }
    std::string shown = format_semilinear_set(p);
    while (!shown.empty() && shown.back() == '\n') {
        shown.pop_back();
    }
    return {mismatches == 0, shown + "; " + std::to_string(mismatches) +
                                 " mismatches over 91 vectors"};
}

Outcome criterion6()
{
    int mismatches = 0;
    int machines = 0;
    std::string first;
    for (const auto& n : corpus_names()) {
        auto e = load_corpus(n);
        if (e.file.transducer || !e.file.machine.deterministic) {
            continue;
        }
        const CounterMachine& m = e.file.machine;
        ++machines;
        CounterMachine back = inverse_apply(to_null_transducer(m), lambda_acceptor(m.alphabet));
        OracleLang L(m);
        for (const auto& w : testkit::words_upto(m.alphabet, 7)) {
            if (member(back, w) != L(w)) {
                if (mismatches++ == 0) {
                    first = n + " on \"" + w + "\"";
                }
            }
        }
    }
    std::string detail = std::to_string(machines) + " corpus DCMs, " + std::to_string(mismatches) + " mismatches";
    if (!first.empty()) {
        detail += " (first: " + first + ")";
    }
    return {mismatches == 0 && machines > 0, detail};
}

namespace {

bool shuffle_definition(const std::string& w)
{
    std::string ab;
    std::string cd;
    for (char c : w) {
        (c == 'a' || c == 'b' ? ab : cd) += c;
    }
    auto balanced = [](const std::string& s, char x, char y) {
        std::size_t n = s.size() / 2;
        return s.size() % 2 == 0 && s == std::string(n, x) + std::string(n, y);
    };
    return balanced(ab, 'a', 'b') && balanced(cd, 'c', 'd');
}

} // namespace

Outcome criterion7()
{
    const CounterTransducer t = load_corpus("T_shuffle").file.as_transducer();
    const CounterMachine m = load_corpus("M_ab").file.machine;
    const CounterMachine inv = inverse_apply(t, m);
    const std::vector<std::string> table = {"",     "acbd",   "cadb",   "adbc", "ab",   "cd",
                                            "ba",   "dc",     "aabb",   "accbdd", "cadbcd", "abab"};
    int mismatches = 0;
    std::ostringstream rows;
    for (const auto& w : table) {
        bool got = member(inv, w);
        bool want = shuffle_definition(w);
        mismatches += got != want;
        rows << (w.empty() ? "λ" : w) << "=" << (got ? 1 : 0) << (got != want ? "!" : "") << " ";
    }
    return {mismatches == 0 && table.size() == 12, rows.str() + "; " + std::to_string(mismatches) + " mismatches"};
}

Outcome criterion8()
{
    std::mt19937 rng(8888);
    std::vector<CounterMachine> machines;
    for (int i = 0; i < 100; ++i) {
        testkit::RandomOptions opt;
        opt.stay_acyclic = false;
        opt.stay_rate = 0.5;
        opt.reversal_bound = 1 + i % 2;
        machines.push_back(testkit::random_machine(rng, opt));
    }
    for (int i = 0; i < 30; ++i) {
        machines.push_back(testkit::adversarial_stay_loop(rng));
    }
    machines.push_back(load_corpus("stay_loop").file.machine);
    int runs = 0;
    int diverged = 0;
    int false_calls = 0;
    std::string first;
    auto flag = [&](const std::string& why) {
        if (false_calls++ == 0) {
            first = why;
        }
    };
    for (std::size_t mi = 0; mi < machines.size(); ++mi) {
        const CounterMachine& m = machines[mi];
        for (const auto& w : testkit::words_upto(m.alphabet, 4)) {
            ++runs;
            RunTrace trace = run_deterministic(m, w);
            // Independent replay with the raw stepper.
            testkit::RawConfig c = testkit::raw_start(m);
            std::vector<testkit::RawConfig> history{c};
            bool halted = false;
            bool accepted = false;
            for (int s = 0; s < 10000 + static_cast<int>(trace.steps.size()); ++s) {
                if (c.pos == w.size() && m.final_states[c.state]) {
                    accepted = halted = true;
                    break;
                }
                auto next = testkit::raw_successors(m, w, c);
                if (next.size() > 1) {
                    flag("nondeterministic step");
                }
                if (next.empty()) {
                    halted = true;
                    break;
                }
                c = next.front();
                history.push_back(c);
            }
            const std::string where = "machine " + std::to_string(mi) + " on \"" + w + "\"";
            if (trace.verdict != Verdict::Diverge) {
                if (!halted || accepted != (trace.verdict == Verdict::Accept)) {
                    flag(where + ": verdict not reproduced by replay");
                }
                continue;
            }
            ++diverged;
            if (halted || !trace.certificate) {
                flag(where + ": Diverge but replay halts");
                continue;
            }
            const auto& cert = *trace.certificate;
            if (cert.first >= cert.second || cert.second >= trace.steps.size()) {
                flag(where + ": malformed certificate");
                continue;
            }
            const Configuration& a = trace.steps[cert.first].config;
            const Configuration& b = trace.steps[cert.second].config;
            bool ok = a.state == b.state && a.budgets == b.budgets && a.consumed == b.consumed;
            for (int i = 0; i < m.counters; ++i) {
                long long growth = b.values[i] - a.values[i];
                ok = ok && growth >= 0 && growth == cert.growth[i] && (a.values[i] > 0) == (b.values[i] > 0);
            }
            // The segment replayed once more from t2 repeats its state/guard
            // sequence; the raw history covers t2 + 10,000 steps.
            const std::size_t period = cert.second - cert.first;
            for (std::size_t s = cert.second; ok && s + period < history.size(); ++s) {
                ok = history[s].state == history[s - period].state &&
                     testkit::raw_guard(history[s]) == testkit::raw_guard(history[s - period]) &&
                     history[s].pos == history[cert.first].pos;
            }
            if (!ok) {
                flag(where + ": certificate does not replay");
            }
        }
    }
    std::ostringstream detail;
    detail << machines.size() << " machines, " << runs << " runs, " << diverged << " Diverge verdicts, "
           << false_calls << " false classifications";
    if (!first.empty()) {
        detail << " (first: " << first << ")";
    }
    return {false_calls == 0 && diverged > 0, detail.str()};
}

Outcome criterion9()
{
    auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(9999);
    std::vector<CounterMachine> machines = corpus_machines();
    testkit::RandomOptions opt;
    opt.reversal_bound = 1;
    for (int i = 0; i < 50; ++i) {
        machines.push_back(testkit::random_machine(rng, opt));
    }
    int disagreements = 0;
    int prefix_free = 0;
    std::string first;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        bool fast = prefix_free_check_machine(machines[i]);
        bool brute = testkit::brute_prefix_free(enumerate_words(machines[i], 8));
        prefix_free += fast;
        if (fast != brute && disagreements++ == 0) {
            first = "machine " + std::to_string(i) + (fast ? " claimed prefix-free" : " claimed not prefix-free");
        }
    }
    std::ostringstream detail;
    detail << machines.size() << " machines (" << prefix_free << " prefix-free), " << disagreements
           << " disagreements, " << elapsed(start) << " s";
    if (!first.empty()) {
        detail << " (first: " << first << ")";
    }
    return {disagreements == 0, detail.str()};
}

} // namespace acceptance
