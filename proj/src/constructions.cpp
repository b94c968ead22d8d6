#include "rbcm/constructions.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

#include "rbcm/decide.hpp"
#include "construct_util.hpp"

namespace rbcm {

using namespace detail;

namespace {

CounterMachine shell_like(const CounterMachine& m, const std::string& name)
{
    CounterMachine out;
    out.name = name;
    out.counters = m.counters;
    out.reversal_bound = m.reversal_bound;
    out.alphabet = m.alphabet;
    out.marked = m.marked;
    out.deterministic = m.deterministic;
    return out;
}

void require_deterministic(const CounterMachine& m, const char* what)
{
    if (!structurally_deterministic(m)) {
        throw NondeterministicInput(std::string(what) + " needs a deterministic machine");
    }
}

CounterMachine sigma_star_machine(std::string_view alphabet)
{
    return dfa_to_machine(universal_dfa(alphabet), "sigma_star");
}

} // namespace

// ---------------------------------------------------------------------------

CounterMachine intersect_regular(const CounterMachine& m, const Dfa& d)
{
    if (alphabet_union(m.alphabet, "") != alphabet_union(d.alphabet, "")) {
        throw AlphabetMismatch("machine and DFA alphabets differ");
    }
    CounterMachine out = shell_like(m, m.name + "_cap_dfa");
    out.budget_explicit = m.budget_explicit;
    using Key = std::pair<StateId, std::size_t>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId q, std::size_t s) {
        auto [id, fresh] =
            table.intern({q, s}, m.states[q] + "." + std::to_string(s), m.is_final(q) && d.final_states[s]);
        if (fresh) {
            if (m.budget_explicit) {
                out.state_budgets.push_back(m.state_budgets[q]);
            }
            work.push_back(id);
        }
        return id;
    };
    const auto outgoing = outgoing_of(m);
    out.initial = intern(m.initial, d.initial);
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [q, s] = table.key(id);
        for (std::size_t ti : outgoing[q]) {
            Transition t = m.transitions[ti];
            std::size_t s2 = s;
            if (t.move == Move::Right && t.symbol != kEot) {
                s2 = d.next[s][d.letter_index(static_cast<char>(t.symbol))];
            }
            t.from = id;
            t.to = intern(t.to, s2);
            out.transitions.push_back(std::move(t));
        }
    }
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Boolean operations

CounterMachine complement_dcm(const CounterMachine& m)
{
    require_deterministic(m, "complement");
    CounterMachine e = ensure_budget_explicit(m);
    if (!stay_acyclic_check(e)) {
        throw PreconditionViolated("complement needs a machine without stay loops");
    }
    const CounterMachine t = normalize(e, {NormalizeMode::TotalizeDeadState});

    CounterMachine out = shell_like(t, "not_" + m.name);
    out.marked = true;
    out.deterministic = true;
    out.budget_explicit = true;
    // (q, seen_final_at_end) plus the accepting sink.
    using Key = std::pair<StateId, bool>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId q, bool seen) {
        auto [id, fresh] = table.intern({q, seen}, t.states[q] + (seen ? "+" : "-"), false);
        if (fresh) {
            out.state_budgets.push_back(t.state_budgets[q]);
            work.push_back(id);
        }
        return id;
    };
    out.initial = intern(t.initial, false);
    StateId accept = static_cast<StateId>(-1);
    auto accept_state = [&](StateId budget_source) {
        if (accept == static_cast<StateId>(-1)) {
            accept = out.add_state("accept", true);
            out.state_budgets.push_back(out.state_budgets[budget_source]);
        }
        return accept;
    };
    const auto outgoing = outgoing_of(t);
    std::vector<std::pair<StateId, std::uint32_t>> termini;
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [q, seen] = table.key(id);
        const bool now_seen = seen || t.is_final(q);
        std::vector<bool> eot_defined(t.num_guards(), false);
        for (std::size_t ti : outgoing[q]) {
            Transition tr = t.transitions[ti];
            if (tr.symbol == kEot) {
                eot_defined[tr.guard.positive] = true;
                tr.from = id;
                tr.to = intern(tr.to, now_seen);
            } else {
                if (seen) {
                    continue; // the end marker has already been reached
                }
                tr.from = id;
                tr.to = intern(tr.to, false);
            }
            out.transitions.push_back(std::move(tr));
        }
        if (!now_seen) {
            for (std::uint32_t g = 0; g < t.num_guards(); ++g) {
                if (!eot_defined[g]) {
                    termini.emplace_back(id, g);
                }
            }
        }
    }
    for (auto [id, g] : termini) {
        out.transitions.push_back(
            Transition{id, kEot, Guard{g}, accept_state(id), Move::Stay, std::vector<int>(out.counters, 0), ""});
    }
    out.canonicalize();
    return out;
}

CounterMachine intersect_machines(const CounterMachine& a_in, const CounterMachine& b_in)
{
    const std::string alphabet = alphabet_union(a_in.alphabet, b_in.alphabet);
    int bound = 0;
    auto [a, b] = align_budgets(with_alphabet(a_in, alphabet), with_alphabet(b_in, alphabet), bound);
    const int ka = a.counters;
    const int kb = b.counters;
    if (ka + kb > kMaxCounters) {
        throw PreconditionViolated("product needs too many counters");
    }
    CounterMachine out;
    out.name = a.name + "_and_" + b.name;
    out.counters = ka + kb;
    out.reversal_bound = bound;
    out.alphabet = alphabet;
    out.marked = true;
    out.deterministic = structurally_deterministic(a) && structurally_deterministic(b);

    // phase 0: a moves; phase 1 + i: b moves, a owes a right move on letter i;
    // phase kEnd: a has accepted at the end marker, b finishes.
    const int kEnd = static_cast<int>(alphabet.size()) + 1;
    using Key = std::tuple<StateId, StateId, int>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId qa, StateId qb, int phase) {
        std::string name = a.states[qa] + "&" + b.states[qb];
        if (phase == kEnd) {
            name += "!";
        } else if (phase > 0) {
            name += std::string("^") + alphabet[phase - 1];
        }
        auto [id, fresh] = table.intern({qa, qb, phase}, name, phase == kEnd && b.is_final(qb));
        if (fresh) {
            work.push_back(id);
        }
        return id;
    };
    const auto out_a = outgoing_of(a);
    const auto out_b = outgoing_of(b);
    out.initial = intern(a.initial, b.initial, 0);
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [qa, qb, phase] = table.key(id);
        if (phase == 0) {
            for (std::size_t ti : out_a[qa]) {
                const Transition& t = a.transitions[ti];
                if (t.symbol == kEot && a.is_final(qa)) {
                    continue; // accepted already; hand over instead
                }
                int next_phase = 0;
                if (t.move == Move::Right) {
                    next_phase = 1 + static_cast<int>(alphabet.find(static_cast<char>(t.symbol)));
                }
                StateId to = intern(t.to, qb, next_phase);
                for (std::uint32_t g = 0; g < (1U << kb); ++g) {
                    out.transitions.push_back(Transition{id, t.symbol, join_guards(t.guard, Guard{g}, ka), to,
                                                         Move::Stay,
                                                         concat_deltas(t.deltas, std::vector<int>(kb, 0)), ""});
                }
            }
            if (a.is_final(qa)) {
                StateId to = intern(qa, qb, kEnd);
                for (std::uint32_t g = 0; g < out.num_guards(); ++g) {
                    out.transitions.push_back(
                        Transition{id, kEot, Guard{g}, to, Move::Stay, std::vector<int>(out.counters, 0), ""});
                }
            }
        } else {
            const bool at_end = phase == kEnd;
            const Symbol owed = at_end ? kEot : static_cast<unsigned char>(alphabet[phase - 1]);
            for (std::size_t ti : out_b[qb]) {
                const Transition& t = b.transitions[ti];
                if (t.symbol != owed) {
                    continue;
                }
                StateId to = at_end ? intern(qa, t.to, kEnd) : intern(qa, t.to, t.move == Move::Right ? 0 : phase);
                for (std::uint32_t g = 0; g < (1U << ka); ++g) {
                    out.transitions.push_back(Transition{id, t.symbol, join_guards(Guard{g}, t.guard, ka), to, t.move,
                                                         concat_deltas(std::vector<int>(ka, 0), t.deltas), ""});
                }
            }
        }
    }
    out.canonicalize();
    return out;
}

CounterMachine union_dcm(const CounterMachine& m1, const CounterMachine& m2)
{
    const std::string alphabet = alphabet_union(m1.alphabet, m2.alphabet);
    CounterMachine n1 = complement_dcm(with_alphabet(m1, alphabet));
    CounterMachine n2 = complement_dcm(with_alphabet(m2, alphabet));
    CounterMachine out = complement_dcm(intersect_machines(n1, n2));
    out.name = m1.name + "_or_" + m2.name;
    return out;
}

CounterMachine boolean_dcm(const CounterMachine& m1, const CounterMachine* m2, BooleanOp op)
{
    if (op == BooleanOp::Not) {
        return complement_dcm(m1);
    }
    if (m2 == nullptr) {
        throw PreconditionViolated("binary Boolean operation needs two machines");
    }
    if (op == BooleanOp::And) {
        require_deterministic(m1, "and");
        require_deterministic(*m2, "and");
        return intersect_machines(m1, *m2);
    }
    return union_dcm(m1, *m2);
}

// ---------------------------------------------------------------------------
// End-marker elimination for one counter

StripResult strip_end_marker_one_counter_detailed(const CounterMachine& m)
{
    if (m.counters != 1) {
        throw PreconditionViolated("end-marker elimination needs exactly one counter");
    }
    require_deterministic(m, "end-marker elimination");
    StripResult r;
    r.source = ensure_budget_explicit(m);
    const CounterMachine& src = r.source;
    if (!src.marked) {
        // Nothing to eliminate; still reshape so the labels are meaningful.
        CounterMachine copy = src;
        copy.marked = true;
        return strip_end_marker_one_counter_detailed(copy);
    }

    std::vector<UnaryDfa> behaviours;
    for (StateId q = 0; q < src.num_states(); ++q) {
        behaviours.push_back(end_marker_behavior(src, q));
    }
    UnaryAlignment align = align_unary_family(behaviours);
    const long long t = static_cast<long long>(align.tail);
    const long long lambda = static_cast<long long>(align.loop);
    r.tail = t;
    r.loop = lambda;

    CounterMachine& out = r.machine;
    out.name = m.name + "_ne";
    out.counters = 1;
    out.reversal_bound = m.reversal_bound;
    out.alphabet = src.alphabet;
    out.marked = false;
    out.deterministic = true;

    using Key = std::tuple<StateId, long long, long long>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId q, long long d, long long j) {
        bool fin = align.members[q].accept.count(static_cast<std::size_t>(d + j)) != 0;
        auto [id, fresh] = table.intern(
            {q, d, j}, src.states[q] + "@" + std::to_string(d) + "." + std::to_string(j), fin);
        if (fresh) {
            r.labels.push_back(StripLabel{q, d, j});
            work.push_back(id);
        }
        return id;
    };
    const auto outgoing = outgoing_of(src);
    out.initial = intern(src.initial, 0, 0);
    const Guard zero{0};
    const Guard pos{1};
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [q, d, j] = table.key(id);
        for (std::size_t ti : outgoing[q]) {
            const Transition& tr = src.transitions[ti];
            if (tr.symbol == kEot) {
                continue;
            }
            const int alpha = tr.deltas[0];
            auto emit = [&](Guard g, StateId to, int delta) {
                out.transitions.push_back(Transition{id, tr.symbol, g, to, tr.move, {delta}, ""});
            };
            if (!tr.guard.is_positive(0)) {
                if (d == 0) { // rule 1
                    emit(zero, intern(tr.to, alpha, 0), 0);
                }
                continue;
            }
            if (d >= 1 && j == 0 && d + alpha >= 0 && d + alpha <= t) { // rule 2
                emit(zero, intern(tr.to, d + alpha, 0), 0);
            }
            if (d == t && alpha >= 0) { // rule 3
                StateId to = intern(tr.to, t, (j + alpha) % lambda);
                if (!(j == 0 && alpha == 0)) {
                    emit(zero, to, alpha);
                }
                emit(pos, to, alpha);
            }
            if (d == t && alpha < 0) { // rule 4
                emit(pos, intern(tr.to, t, (j - 1 + lambda) % lambda), -1);
            }
        }
    }
    out.canonicalize();
    return r;
}

CounterMachine strip_end_marker_one_counter(const CounterMachine& m)
{
    return strip_end_marker_one_counter_detailed(m).machine;
}

// ---------------------------------------------------------------------------

bool is_non_exiting(const CounterMachine& m)
{
    return std::none_of(m.transitions.begin(), m.transitions.end(),
                        [&](const Transition& t) { return m.is_final(t.from); });
}

CounterMachine make_non_exiting(const CounterMachine& m)
{
    if (!prefix_free_check_machine(m)) {
        throw NotPrefixFree();
    }
    CounterMachine out = structurally_deterministic(m) ? normalize(m, {NormalizeMode::NoStayIntoFinal}) : m;
    std::erase_if(out.transitions, [&](const Transition& t) { return out.is_final(t.from); });
    return trim_unreachable(out);
}

CounterMachine concat_pf_dcmne_dcm(const CounterMachine& m1_in, const CounterMachine& m2_in)
{
    require_deterministic(m1_in, "prefix-free concatenation");
    require_deterministic(m2_in, "prefix-free concatenation");
    if (std::any_of(m1_in.transitions.begin(), m1_in.transitions.end(),
                    [](const Transition& t) { return t.symbol == kEot; })) {
        throw PreconditionViolated("left machine must accept without the end marker");
    }
    if (!is_non_exiting(m1_in)) {
        throw PreconditionViolated("left machine must be non-exiting");
    }
    return detail::concat_pf_dcmne_dcm_unchecked(m1_in, m2_in);
}

CounterMachine detail::concat_pf_dcmne_dcm_unchecked(const CounterMachine& m1_in, const CounterMachine& m2_in)
{
    const std::string alphabet = alphabet_union(m1_in.alphabet, m2_in.alphabet);
    int bound = 0;
    auto [m1, m2] = align_budgets(normalize(with_alphabet(m1_in, alphabet), {NormalizeMode::NoStayIntoFinal}),
                                  with_alphabet(m2_in, alphabet), bound);
    const int k1 = m1.counters;
    const int k2 = m2.counters;
    if (k1 + k2 > kMaxCounters) {
        throw PreconditionViolated("concatenation needs too many counters");
    }
    CounterMachine out;
    out.name = m1.name + "_then_" + m2.name;
    out.counters = k1 + k2;
    out.reversal_bound = bound;
    out.alphabet = alphabet;
    out.marked = m2.marked;
    out.deterministic = true;

    // States of m1 first (names prefixed 1:), then m2 (2:).
    for (StateId q = 0; q < m1.num_states(); ++q) {
        out.add_state("1:" + m1.states[q], false);
    }
    const StateId offset = static_cast<StateId>(m1.num_states());
    for (StateId q = 0; q < m2.num_states(); ++q) {
        out.add_state("2:" + m2.states[q], m2.is_final(q));
    }
    out.initial = m1.is_final(m1.initial) ? offset + m2.initial : m1.initial;
    for (const auto& t : m1.transitions) {
        StateId to = m1.is_final(t.to) ? offset + m2.initial : t.to;
        out.transitions.push_back(
            Transition{t.from, t.symbol, t.guard, to, t.move, concat_deltas(t.deltas, std::vector<int>(k2, 0)), ""});
    }
    for (const auto& t : m2.transitions) {
        for (std::uint32_t g = 0; g < (1U << k1); ++g) {
            out.transitions.push_back(Transition{offset + t.from, t.symbol, join_guards(Guard{g}, t.guard, k1),
                                                 offset + t.to, t.move,
                                                 concat_deltas(std::vector<int>(k1, 0), t.deltas), ""});
        }
    }
    out.canonicalize();
    return trim_unreachable(out);
}

CounterMachine prepare_for_regular_concat(const CounterMachine& m1)
{
    require_deterministic(m1, "concatenation with a regular language");
    if (std::any_of(m1.transitions.begin(), m1.transitions.end(),
                    [](const Transition& t) { return t.symbol == kEot; })) {
        throw PreconditionViolated("left machine must accept without the end marker");
    }
    CounterMachine e = ensure_budget_explicit(m1);
    if (!stay_acyclic_check(e)) {
        throw PreconditionViolated("left machine has stay loops");
    }
    return normalize(e, {NormalizeMode::TotalizeDeadState, NormalizeMode::NoStayIntoFinal});
}

CounterMachine concat_dcmne_regular(const CounterMachine& m1_in, const Dfa& d_in)
{
    const std::string alphabet = alphabet_union(m1_in.alphabet, d_in.alphabet);
    const CounterMachine p = prepare_for_regular_concat(with_alphabet(m1_in, alphabet));
    const Dfa d = dfa_with_alphabet(d_in, alphabet);

    CounterMachine out = shell_like(p, m1_in.name + "_cat_dfa");
    out.marked = false;
    out.deterministic = true;
    out.budget_explicit = true;
    using Key = std::pair<StateId, std::vector<bool>>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId q, std::vector<bool> tracked) {
        bool fin = false;
        std::string name = p.states[q] + "{";
        bool first = true;
        for (std::size_t s = 0; s < tracked.size(); ++s) {
            if (tracked[s]) {
                fin = fin || d.final_states[s];
                name += (first ? "" : ",") + std::to_string(s);
                first = false;
            }
        }
        name += "}";
        auto [id, fresh] = table.intern({q, tracked}, name, fin);
        if (fresh) {
            out.state_budgets.push_back(p.state_budgets[q]);
            work.push_back(id);
        }
        return id;
    };
    std::vector<bool> start(d.num_states(), false);
    if (p.is_final(p.initial)) {
        start[d.initial] = true;
    }
    out.initial = intern(p.initial, start);
    const auto outgoing = outgoing_of(p);
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [q, tracked] = table.key(id);
        for (std::size_t ti : outgoing[q]) {
            Transition t = p.transitions[ti];
            std::vector<bool> next = tracked;
            if (t.move == Move::Right) {
                std::size_t a = d.letter_index(static_cast<char>(t.symbol));
                std::fill(next.begin(), next.end(), false);
                for (std::size_t s = 0; s < tracked.size(); ++s) {
                    if (tracked[s]) {
                        next[d.next[s][a]] = true;
                    }
                }
                if (p.is_final(t.to)) {
                    next[d.initial] = true;
                }
            }
            t.from = id;
            t.to = intern(t.to, std::move(next));
            out.transitions.push_back(std::move(t));
        }
    }
    out.canonicalize();
    return out;
}

CounterMachine concat_dcm1_regular(const CounterMachine& m, const Dfa& d)
{
    if (m.counters != 1) {
        throw PreconditionViolated("needs exactly one counter");
    }
    CounterMachine out = concat_dcmne_regular(strip_end_marker_one_counter(m), d);
    out.marked = true;
    out.name = m.name + "_cat_dfa";
    return out;
}

CounterMachine concat_pf_regular_dcm(const Dfa& d, const CounterMachine& m)
{
    if (!prefix_free_check_dfa(d)) {
        throw NotPrefixFree();
    }
    CounterMachine left = dfa_to_machine(dfa_minimize(d), "pf");
    std::erase_if(left.transitions, [&](const Transition& t) { return left.is_final(t.from); });
    return concat_pf_dcmne_dcm(trim_unreachable(left), m);
}

// ---------------------------------------------------------------------------

CounterMachine left_quotient_word(const CounterMachine& m, std::string_view w)
{
    require_deterministic(m, "left quotient");
    CounterMachine e = ensure_budget_explicit(m);
    for (char c : w) {
        if (e.alphabet.find(c) == std::string::npos) {
            return empty_machine(e.alphabet, e.counters, e.marked);
        }
    }
    // Run on w with the end marker disabled: the run halts at the end of w
    // or earlier.
    CounterMachine probe = e;
    std::erase_if(probe.transitions, [](const Transition& t) { return t.symbol == kEot; });
    std::fill(probe.final_states.begin(), probe.final_states.end(), false);
    RunTrace trace = run_deterministic(probe, w);
    const Configuration& last = trace.steps.back().config;
    if (trace.verdict != Verdict::Reject || last.consumed != w.size()) {
        CounterMachine empty = empty_machine(e.alphabet, e.counters, e.marked);
        empty.reversal_bound = e.reversal_bound;
        return empty;
    }
    // The first configuration of the run that has consumed all of w.
    std::size_t arrive = 0;
    while (trace.steps[arrive].config.consumed != w.size()) {
        ++arrive;
    }
    const Configuration& c = trace.steps[arrive].config;

    CounterMachine out = e;
    out.name = m.name + "_quot";
    out.budget_explicit = false;
    out.state_budgets.clear();
    // One stay step per unit of counter value, on whatever symbol is read.
    std::vector<int> steps;
    for (int i = 0; i < e.counters; ++i) {
        steps.insert(steps.end(), static_cast<std::size_t>(c.values[i]), i);
    }
    if (steps.empty()) {
        out.initial = c.state;
        return trim_unreachable(out);
    }
    out.marked = true;
    std::vector<StateId> chain;
    for (std::size_t n = 0; n < steps.size(); ++n) {
        chain.push_back(out.add_state(m.name + "_prime" + std::to_string(n), false));
    }
    std::vector<long long> values(e.counters, 0);
    for (std::size_t n = 0; n < steps.size(); ++n) {
        StateId to = n + 1 < steps.size() ? chain[n + 1] : c.state;
        std::vector<int> deltas(e.counters, 0);
        deltas[steps[n]] = 1;
        for (Symbol sym : symbols_of(out)) {
            out.transitions.push_back(Transition{chain[n], sym, Guard::of(values), to, Move::Stay, deltas, ""});
        }
        ++values[steps[n]];
    }
    out.initial = chain.front();
    out.canonicalize();
    return trim_unreachable(out);
}

// ---------------------------------------------------------------------------
// Nondeterministic concatenation and insertion

CounterMachine concat_ncm(const CounterMachine& m1_in, const CounterMachine& m2_in)
{
    const std::string alphabet = alphabet_union(m1_in.alphabet, m2_in.alphabet);
    int bound = 0;
    auto [m1, m2] = align_budgets(with_alphabet(m1_in, alphabet), with_alphabet(m2_in, alphabet), bound);
    const int k1 = m1.counters;
    const int k2 = m2.counters;
    if (k1 + k2 > kMaxCounters) {
        throw PreconditionViolated("concatenation needs too many counters");
    }
    CounterMachine out;
    out.name = m1.name + "_cat_" + m2.name;
    out.counters = k1 + k2;
    out.reversal_bound = bound;
    out.alphabet = alphabet;
    out.marked = true;
    out.deterministic = false;

    // m1 states in three roles: arrived (just moved right), stayed, and
    // finishing (replaying m1's end-marker run while the head rests on the
    // first letter of the second factor). Then m2's states.
    const StateId n1 = static_cast<StateId>(m1.num_states());
    for (StateId q = 0; q < n1; ++q) {
        out.add_state("1>" + m1.states[q], false);
    }
    for (StateId q = 0; q < n1; ++q) {
        out.add_state("1." + m1.states[q], false);
    }
    for (StateId q = 0; q < n1; ++q) {
        out.add_state("1$" + m1.states[q], false);
    }
    const StateId base2 = 3 * n1;
    for (StateId q = 0; q < m2.num_states(); ++q) {
        out.add_state("2:" + m2.states[q], m2.is_final(q));
    }
    auto arrived = [](StateId q) { return q; };
    auto stayed = [&](StateId q) { return n1 + q; };
    auto finishing = [&](StateId q) { return 2 * n1 + q; };
    out.initial = arrived(m1.initial);
    const std::vector<int> zero1(k1, 0);
    const std::vector<int> zero2(k2, 0);
    const std::vector<int> zero_all(k1 + k2, 0);
    const auto symbols = symbols_of(out);

    for (const auto& t : m1.transitions) {
        const Guard g = join_guards(t.guard, Guard{0}, k1);
        const auto deltas = concat_deltas(t.deltas, zero2);
        if (t.symbol == kEot) {
            for (Symbol s : symbols) {
                out.transitions.push_back(Transition{finishing(t.from), s, g, finishing(t.to), Move::Stay, deltas, ""});
            }
            continue;
        }
        StateId to = t.move == Move::Right ? arrived(t.to) : stayed(t.to);
        out.transitions.push_back(Transition{arrived(t.from), t.symbol, g, to, t.move, deltas, ""});
        out.transitions.push_back(Transition{stayed(t.from), t.symbol, g, to, t.move, deltas, ""});
    }
    for (StateId q = 0; q < n1; ++q) {
        for (std::uint32_t g1 = 0; g1 < (1U << k1); ++g1) {
            const Guard g = join_guards(Guard{g1}, Guard{0}, k1);
            for (Symbol s : symbols) {
                out.transitions.push_back(Transition{arrived(q), s, g, finishing(q), Move::Stay, zero_all, ""});
                if (m1.is_final(q)) {
                    out.transitions.push_back(
                        Transition{finishing(q), s, g, base2 + m2.initial, Move::Stay, zero_all, ""});
                }
            }
        }
    }
    for (const auto& t : m2.transitions) {
        for (std::uint32_t g1 = 0; g1 < (1U << k1); ++g1) {
            out.transitions.push_back(Transition{base2 + t.from, t.symbol, join_guards(Guard{g1}, t.guard, k1),
                                                 base2 + t.to, t.move, concat_deltas(zero1, t.deltas), ""});
        }
    }
    out.canonicalize();
    return trim_unreachable(out);
}

CounterMachine inverse_insertion_ncm(const CounterMachine& m, InsertionOp op, int gaps)
{
    switch (op) {
    case InsertionOp::Prefix:
        return concat_ncm(m, sigma_star_machine(m.alphabet));
    case InsertionOp::Suffix:
        return concat_ncm(sigma_star_machine(m.alphabet), m);
    case InsertionOp::Infix:
        return concat_ncm(concat_ncm(sigma_star_machine(m.alphabet), m), sigma_star_machine(m.alphabet));
    case InsertionOp::Outfix:
        gaps = 1;
        break;
    case InsertionOp::Embed:
        if (gaps < 1) {
            throw PreconditionViolated("embedding needs at least one gap");
        }
        break;
    }

    CounterMachine out = shell_like(m, m.name + "_emb" + std::to_string(gaps));
    out.marked = true;
    out.deterministic = false;
    // (q, gaps used, role) with role 0 arrived, 1 stayed, 2 inside a gap.
    using Key = std::tuple<StateId, int, int>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId q, int used, int role) {
        static const char* tags[] = {">", ".", "~"};
        auto [id, fresh] = table.intern({q, used, role}, m.states[q] + tags[role] + std::to_string(used),
                                        role != 2 && m.is_final(q));
        if (fresh) {
            work.push_back(id);
        }
        return id;
    };
    const auto outgoing = outgoing_of(m);
    const auto letters = letters_of(m);
    const auto symbols = symbols_of(m);
    const std::vector<int> zero(m.counters, 0);
    out.initial = intern(m.initial, 0, 0);
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [q, used, role] = table.key(id);
        if (role == 2) {
            for (std::uint32_t g = 0; g < m.num_guards(); ++g) {
                for (Symbol s : letters) {
                    out.transitions.push_back(Transition{id, s, Guard{g}, id, Move::Right, zero, ""});
                }
                StateId back = intern(q, used, 0);
                for (Symbol s : symbols) {
                    out.transitions.push_back(Transition{id, s, Guard{g}, back, Move::Stay, zero, ""});
                }
            }
            continue;
        }
        for (std::size_t ti : outgoing[q]) {
            Transition t = m.transitions[ti];
            t.from = id;
            t.to = intern(t.to, used, t.move == Move::Right ? 0 : 1);
            out.transitions.push_back(std::move(t));
        }
        if (role == 0 && used < gaps) {
            StateId gap = intern(q, used + 1, 2);
            for (std::uint32_t g = 0; g < m.num_guards(); ++g) {
                for (Symbol s : letters) {
                    out.transitions.push_back(Transition{id, s, Guard{g}, gap, Move::Stay, zero, ""});
                }
            }
        }
    }
    out.canonicalize();
    return out;
}

} // namespace rbcm
