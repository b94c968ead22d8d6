#include "rbcm/machine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace rbcm {

Guard Guard::of(const std::vector<long long>& values)
{
    Guard g;
    for (std::size_t i = 0; i < values.size(); ++i) {
        g.set_positive(static_cast<int>(i), values[i] > 0);
    }
    return g;
}

StateId CounterMachine::add_state(std::string state_name, bool is_final_state)
{
    states.push_back(std::move(state_name));
    final_states.push_back(is_final_state);
    return static_cast<StateId>(states.size() - 1);
}

std::optional<std::size_t> CounterMachine::symbol_index(Symbol s) const
{
    if (s == kEot) {
        return alphabet.size();
    }
    auto pos = alphabet.find(static_cast<char>(s));
    if (pos == std::string::npos) {
        return std::nullopt;
    }
    return pos;
}

void CounterMachine::canonicalize()
{
    std::sort(transitions.begin(), transitions.end());
    transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
}

bool CounterMachine::operator==(const CounterMachine& o) const
{
    return name == o.name && counters == o.counters && reversal_bound == o.reversal_bound
        && alphabet == o.alphabet && states == o.states && initial == o.initial
        && final_states == o.final_states && transitions == o.transitions && marked == o.marked
        && deterministic == o.deterministic;
}

TransitionIndex::TransitionIndex(const CounterMachine& m)
    : symbols_(m.num_symbols()), guards_(m.num_guards()),
      buckets_(m.num_states() * symbols_ * guards_)
{
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        const auto& t = m.transitions[i];
        auto sym = m.symbol_index(t.symbol);
        if (!sym || t.from >= m.num_states() || t.guard.positive >= guards_) {
            continue;
        }
        buckets_[(static_cast<std::size_t>(t.from) * symbols_ + *sym) * guards_ + t.guard.positive].push_back(i);
    }
}

std::string guard_to_string(Guard g, int counters)
{
    if (counters == 0) {
        return "-";
    }
    std::string s;
    for (int i = 0; i < counters; ++i) {
        s += g.is_positive(i) ? 'p' : 'z';
    }
    return s;
}

std::string delta_to_string(int delta)
{
    return delta > 0 ? "+1" : (delta < 0 ? "-1" : "0");
}

namespace {

std::string symbol_name(Symbol s)
{
    return s == kEot ? std::string("$") : std::string(1, static_cast<char>(s));
}

std::string describe(const CounterMachine& m, const Transition& t)
{
    auto state = [&](StateId q) { return q < m.num_states() ? m.states[q] : "#" + std::to_string(q); };
    return state(t.from) + " " + symbol_name(t.symbol) + " " + guard_to_string(t.guard, m.counters) + " -> "
        + state(t.to);
}

} // namespace

bool structurally_deterministic(const CounterMachine& m)
{
    std::set<std::tuple<StateId, Symbol, std::uint32_t>> seen;
    for (const auto& t : m.transitions) {
        if (!seen.emplace(t.from, t.symbol, t.guard.positive).second) {
            return false;
        }
    }
    return true;
}

ValidationReport validate_machine(const CounterMachine& m)
{
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    if (m.counters < 0 || m.counters > kMaxCounters) {
        fail("counter count out of range");
        return report;
    }
    if (m.reversal_bound < 0 && m.reversal_bound != kUnbounded) {
        fail("negative reversal bound");
    }
    for (std::size_t i = 0; i < m.alphabet.size(); ++i) {
        char c = m.alphabet[i];
        if (c == '$' || c == '"' || std::isspace(static_cast<unsigned char>(c))) {
            fail(std::string("reserved character in alphabet: ") + c);
        }
        if (m.alphabet.find(c, i + 1) != std::string::npos) {
            fail(std::string("duplicate letter in alphabet: ") + c);
        }
    }
    if (m.states.empty()) {
        fail("machine has no states");
    }
    if (m.final_states.size() != m.states.size()) {
        fail("final-state table does not match the state list");
    }
    if (m.initial >= m.num_states()) {
        fail("initial state out of range");
    }
    if (m.budget_explicit && m.state_budgets.size() != m.num_states()) {
        fail("budget table does not match the state list");
    }
    const std::uint32_t guard_limit = m.num_guards();
    for (const auto& t : m.transitions) {
        if (t.from >= m.num_states() || t.to >= m.num_states()) {
            fail("transition endpoint out of range");
            continue;
        }
        if (!m.symbol_index(t.symbol)) {
            fail("symbol outside alphabet: " + describe(m, t));
        }
        if (t.guard.positive >= guard_limit) {
            fail("guard wider than counter count: " + describe(m, t));
        }
        if (t.deltas.size() != static_cast<std::size_t>(m.counters)) {
            fail("delta vector length differs from counter count: " + describe(m, t));
            continue;
        }
        for (int i = 0; i < m.counters; ++i) {
            int d = t.deltas[i];
            if (d < -1 || d > 1) {
                fail("delta outside {-1,0,+1}: " + describe(m, t));
            } else if (d < 0 && !t.guard.is_positive(i)) {
                fail("decrement on zero: " + describe(m, t));
            }
        }
        if (t.symbol == kEot) {
            if (!m.marked) {
                fail("EOT in unmarked: " + describe(m, t));
            }
            if (t.move == Move::Right) {
                fail("right move on EOT: " + describe(m, t));
            }
        }
    }
    if (m.deterministic && !structurally_deterministic(m)) {
        fail("nondeterministic transitions in a machine declared deterministic");
    }
    return report;
}

Configuration initial_configuration(const CounterMachine& m)
{
    Configuration c;
    c.state = m.initial;
    c.values.assign(m.counters, 0);
    c.budgets.assign(m.counters, CounterBudget{});
    return c;
}

Symbol head_symbol(std::string_view word, std::size_t consumed)
{
    return consumed < word.size() ? static_cast<unsigned char>(word[consumed]) : kEot;
}

namespace {

/// Budget update for one counter; false when the bound would be exceeded.
bool update_budget(CounterBudget& b, int delta, int bound)
{
    if (delta == 0) {
        return true;
    }
    Direction dir = delta > 0 ? Direction::Up : Direction::Down;
    if (b.direction != Direction::None && b.direction != dir) {
        ++b.reversals;
        if (bound != kUnbounded && b.reversals > bound) {
            return false;
        }
    }
    b.direction = dir;
    return true;
}

} // namespace

std::optional<Configuration> apply_transition(const CounterMachine& m, const Configuration& c, const Transition& t)
{
    if (t.from != c.state || Guard::of(c.values) != t.guard) {
        return std::nullopt;
    }
    Configuration next = c;
    next.state = t.to;
    for (int i = 0; i < m.counters; ++i) {
        next.values[i] += t.deltas[i];
        if (next.values[i] < 0 || !update_budget(next.budgets[i], t.deltas[i], m.reversal_bound)) {
            return std::nullopt;
        }
    }
    if (t.move == Move::Right) {
        if (t.symbol == kEot) {
            return std::nullopt;
        }
        ++next.consumed;
    }
    return next;
}

std::vector<std::pair<Configuration, std::size_t>> successors(
    const CounterMachine& m, const TransitionIndex& index, const Configuration& c, std::string_view word)
{
    std::vector<std::pair<Configuration, std::size_t>> out;
    auto sym = m.symbol_index(head_symbol(word, c.consumed));
    if (!sym) {
        return out;
    }
    for (std::size_t ti : index.at(c.state, *sym, Guard::of(c.values))) {
        if (auto next = apply_transition(m, c, m.transitions[ti])) {
            out.emplace_back(std::move(*next), ti);
        }
    }
    return out;
}

std::vector<Configuration> step(const CounterMachine& m, const Configuration& c, std::string_view word)
{
    TransitionIndex index(m);
    std::vector<Configuration> out;
    for (auto& [next, ti] : successors(m, index, c, word)) {
        out.push_back(std::move(next));
    }
    return out;
}

namespace {

struct SnapshotKey {
    StateId state;
    std::uint32_t guard;
    std::vector<CounterBudget> budgets;
    bool operator==(const SnapshotKey&) const = default;
};

struct SnapshotKeyHash {
    std::size_t operator()(const SnapshotKey& k) const noexcept
    {
        std::size_t h = k.state * 1000003ULL ^ k.guard;
        for (const auto& b : k.budgets) {
            h = h * 31 + static_cast<std::size_t>(b.direction) * 7 + static_cast<std::size_t>(b.reversals);
        }
        return h;
    }
};

} // namespace

RunTrace run_deterministic_from(
    const CounterMachine& m, const Configuration& start, std::string_view word, RunOptions options)
{
    if (!m.deterministic && !structurally_deterministic(m)) {
        throw NondeterministicInput();
    }
    TransitionIndex index(m);
    RunTrace trace;
    const bool bounded = m.finite_budget();

    // Configurations seen since the head last moved, with their step numbers.
    std::vector<Configuration> window;
    std::vector<std::size_t> window_steps;
    std::unordered_map<SnapshotKey, std::vector<std::size_t>, SnapshotKeyHash> seen;

    Configuration cur = start;
    for (std::size_t step_no = 0;; ++step_no) {
        if (options.record_trace) {
            trace.steps.push_back(RunStep{cur, std::nullopt});
        }
        if (cur.consumed == word.size() && m.is_final(cur.state)) {
            trace.verdict = Verdict::Accept;
            return trace;
        }
        if (!bounded && step_no >= options.unbounded_step_limit) {
            throw Error("step limit exceeded while running a machine without a reversal bound");
        }

        SnapshotKey key{cur.state, Guard::of(cur.values).positive,
                        bounded ? cur.budgets : std::vector<CounterBudget>{}};
        auto& earlier = seen[key];
        for (auto it = earlier.rbegin(); it != earlier.rend(); ++it) {
            const Configuration& old = window[*it];
            std::vector<long long> growth(m.counters);
            bool ok = true;
            for (int i = 0; i < m.counters && ok; ++i) {
                growth[i] = cur.values[i] - old.values[i];
                ok = growth[i] >= 0;
            }
            for (int i = 0; i < m.counters && ok; ++i) {
                if (growth[i] == 0) {
                    continue;
                }
                for (std::size_t j = *it; j < window.size() && ok; ++j) {
                    ok = window[j].values[i] > 0;
                }
            }
            if (ok) {
                trace.verdict = Verdict::Diverge;
                trace.certificate = DivergenceCertificate{window_steps[*it], step_no, std::move(growth)};
                return trace;
            }
        }
        earlier.push_back(window.size());
        window.push_back(cur);
        window_steps.push_back(step_no);

        auto next = successors(m, index, cur, word);
        if (next.empty()) {
            trace.verdict = Verdict::Reject;
            return trace;
        }
        if (next.size() > 1) {
            throw NondeterministicInput("several transitions apply in state " + m.states[cur.state]);
        }
        const Transition& t = m.transitions[next.front().second];
        trace.output += t.output;
        if (options.record_trace) {
            trace.steps.back().transition = next.front().second;
        }
        if (next.front().first.consumed != cur.consumed) {
            window.clear();
            window_steps.clear();
            seen.clear();
        }
        cur = std::move(next.front().first);
    }
}

RunTrace run_deterministic(const CounterMachine& m, std::string_view word, RunOptions options)
{
    return run_deterministic_from(m, initial_configuration(m), word, options);
}

std::optional<bool> accepts_by_search(const CounterMachine& m, std::string_view word, std::size_t max_configurations)
{
    TransitionIndex index(m);
    std::set<Configuration> visited;
    std::deque<Configuration> queue;
    auto start = initial_configuration(m);
    visited.insert(start);
    queue.push_back(std::move(start));
    while (!queue.empty()) {
        Configuration cur = std::move(queue.front());
        queue.pop_front();
        if (cur.consumed == word.size() && m.is_final(cur.state)) {
            return true;
        }
        for (auto& [next, ti] : successors(m, index, cur, word)) {
            if (visited.insert(next).second) {
                if (visited.size() > max_configurations) {
                    return std::nullopt;
                }
                queue.push_back(std::move(next));
            }
        }
    }
    return false;
}

// ---------------------------------------------------------------------------

namespace {

std::string budget_label(const std::vector<CounterBudget>& budgets)
{
    std::string s = "[";
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        if (i) {
            s += ',';
        }
        switch (budgets[i].direction) {
        case Direction::None: s += 'n'; break;
        case Direction::Up: s += 'u'; break;
        case Direction::Down: s += 'd'; break;
        }
        s += std::to_string(budgets[i].reversals);
    }
    return s + "]";
}

} // namespace

CounterMachine enforce_reversal_control(const CounterMachine& m)
{
    if (!m.finite_budget()) {
        throw InfiniteBudget();
    }
    CounterMachine out;
    out.name = m.name;
    out.counters = m.counters;
    out.reversal_bound = m.reversal_bound;
    out.alphabet = m.alphabet;
    out.marked = m.marked;
    out.deterministic = m.deterministic;
    out.budget_explicit = true;

    std::map<std::pair<StateId, std::vector<CounterBudget>>, StateId> ids;
    std::deque<std::pair<StateId, std::vector<CounterBudget>>> work;
    auto intern = [&](StateId q, const std::vector<CounterBudget>& b) {
        auto [it, inserted] = ids.try_emplace({q, b}, 0);
        if (inserted) {
            std::string label = m.counters == 0 ? m.states[q] : m.states[q] + budget_label(b);
            it->second = out.add_state(std::move(label), m.is_final(q));
            out.state_budgets.push_back(b);
            work.emplace_back(q, b);
        }
        return it->second;
    };

    std::vector<std::vector<std::size_t>> outgoing(m.num_states());
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        outgoing[m.transitions[i].from].push_back(i);
    }

    out.initial = intern(m.initial, std::vector<CounterBudget>(m.counters));
    while (!work.empty()) {
        auto [q, budgets] = work.front();
        work.pop_front();
        StateId from = ids.at({q, budgets});
        for (std::size_t ti : outgoing[q]) {
            const Transition& t = m.transitions[ti];
            auto next = budgets;
            bool ok = true;
            for (int i = 0; i < m.counters && ok; ++i) {
                // A counter that never moved is still zero.
                if (budgets[i].direction == Direction::None && t.guard.is_positive(i)) {
                    ok = false;
                    break;
                }
                ok = update_budget(next[i], t.deltas[i], m.reversal_bound);
            }
            if (!ok) {
                continue;
            }
            Transition copy = t;
            copy.from = from;
            copy.to = intern(t.to, next);
            out.transitions.push_back(std::move(copy));
        }
    }
    out.canonicalize();
    return out;
}

CounterMachine ensure_budget_explicit(const CounterMachine& m)
{
    return m.budget_explicit ? m : enforce_reversal_control(m);
}

namespace {

std::string fresh_name(const CounterMachine& m, const std::string& base)
{
    std::unordered_set<std::string> names(m.states.begin(), m.states.end());
    std::string candidate = base;
    for (int i = 1; names.count(candidate); ++i) {
        candidate = base + std::to_string(i);
    }
    return candidate;
}

StateId add_state_like(CounterMachine& m, std::string name, bool is_final, StateId budget_source)
{
    StateId id = m.add_state(fresh_name(m, name), is_final);
    if (m.budget_explicit) {
        m.state_budgets.push_back(m.state_budgets[budget_source]);
    }
    return id;
}

void totalize(CounterMachine& m)
{
    StateId sink = m.add_state(fresh_name(m, "dead"), false);
    if (m.budget_explicit) {
        m.state_budgets.emplace_back(m.counters);
    }
    std::set<std::tuple<StateId, Symbol, std::uint32_t>> defined;
    for (const auto& t : m.transitions) {
        defined.emplace(t.from, t.symbol, t.guard.positive);
    }
    for (StateId q = 0; q < m.num_states(); ++q) {
        for (char c : m.alphabet) {
            Symbol s = static_cast<unsigned char>(c);
            for (std::uint32_t g = 0; g < m.num_guards(); ++g) {
                if (!defined.count({q, s, g})) {
                    m.transitions.push_back(
                        Transition{q, s, Guard{g}, sink, Move::Right, std::vector<int>(m.counters, 0), ""});
                }
            }
        }
    }
}

void retarget_stays_into_finals(CounterMachine& m)
{
    std::map<StateId, StateId> twin;
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        Transition t = m.transitions[i];
        if (t.move != Move::Stay || t.symbol == kEot || !m.is_final(t.to)) {
            continue;
        }
        auto it = twin.find(t.to);
        if (it == twin.end()) {
            StateId f = t.to;
            StateId copy = add_state_like(m, m.states[f] + "'", false, f);
            it = twin.emplace(f, copy).first;
            std::vector<Transition> outgoing;
            for (const auto& u : m.transitions) {
                if (u.from == f) {
                    outgoing.push_back(u);
                }
            }
            for (auto& u : outgoing) {
                u.from = copy;
                m.transitions.push_back(std::move(u));
            }
        }
        m.transitions[i].to = it->second;
    }
}

} // namespace

CounterMachine normalize(const CounterMachine& m, const std::set<NormalizeMode>& modes)
{
    CounterMachine out = m;
    if (modes.count(NormalizeMode::StripEot)) {
        std::erase_if(out.transitions, [](const Transition& t) { return t.symbol == kEot; });
        out.marked = false;
    }
    if (modes.count(NormalizeMode::TotalizeDeadState)) {
        totalize(out);
    }
    if (modes.count(NormalizeMode::NoStayIntoFinal)) {
        if (!m.deterministic) {
            throw NondeterministicInput("no_stay_into_final requires a deterministic machine");
        }
        retarget_stays_into_finals(out);
    }
    out.canonicalize();
    return out;
}

bool stay_acyclic_check(const CounterMachine& m)
{
    using Node = std::tuple<StateId, Symbol, std::uint32_t>;
    std::map<Node, std::vector<Node>> edges;
    for (const auto& t : m.transitions) {
        if (t.move != Move::Stay) {
            continue;
        }
        bool keeps_guard = true;
        for (int i = 0; i < m.counters && keeps_guard; ++i) {
            keeps_guard = t.deltas[i] >= 0 && (t.guard.is_positive(i) || t.deltas[i] == 0);
        }
        if (keeps_guard) {
            edges[{t.from, t.symbol, t.guard.positive}].push_back({t.to, t.symbol, t.guard.positive});
        }
    }
    // Iterative three-colour DFS.
    std::map<Node, int> colour;
    for (const auto& [root, unused] : edges) {
        if (colour[root] != 0) {
            continue;
        }
        std::vector<std::pair<Node, std::size_t>> stack{{root, 0}};
        colour[root] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            auto it = edges.find(node);
            if (it == edges.end() || next == it->second.size()) {
                colour[node] = 2;
                stack.pop_back();
                continue;
            }
            Node child = it->second[next++];
            int& c = colour[child];
            if (c == 1) {
                return false;
            }
            if (c == 0) {
                c = 1;
                stack.emplace_back(child, 0);
            }
        }
    }
    return true;
}

std::string alphabet_union(std::string_view a, std::string_view b)
{
    std::string out(a);
    for (char c : b) {
        if (out.find(c) == std::string::npos) {
            out += c;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

CounterMachine with_alphabet(const CounterMachine& m, std::string_view alphabet)
{
    for (char c : m.alphabet) {
        if (alphabet.find(c) == std::string_view::npos) {
            throw AlphabetMismatch(std::string("alphabet does not contain letter ") + c);
        }
    }
    CounterMachine out = m;
    out.alphabet = std::string(alphabet);
    return out;
}

CounterMachine empty_machine(std::string_view alphabet, int counters, bool marked)
{
    CounterMachine m;
    m.name = "empty";
    m.counters = counters;
    m.alphabet = std::string(alphabet);
    m.marked = marked;
    m.add_state("empty", false);
    return m;
}

CounterMachine trim_unreachable(const CounterMachine& m)
{
    std::vector<std::vector<std::size_t>> outgoing(m.num_states());
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        outgoing[m.transitions[i].from].push_back(i);
    }
    std::vector<long> remap(m.num_states(), -1);
    std::vector<StateId> order{m.initial};
    remap[m.initial] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t ti : outgoing[order[i]]) {
            StateId to = m.transitions[ti].to;
            if (remap[to] < 0) {
                remap[to] = static_cast<long>(order.size());
                order.push_back(to);
            }
        }
    }
    CounterMachine out = m;
    out.states.clear();
    out.final_states.clear();
    out.state_budgets.clear();
    out.transitions.clear();
    for (StateId q : order) {
        out.add_state(m.states[q], m.is_final(q));
        if (m.budget_explicit) {
            out.state_budgets.push_back(m.state_budgets[q]);
        }
    }
    out.initial = 0;
    for (const auto& t : m.transitions) {
        if (remap[t.from] >= 0) {
            Transition c = t;
            c.from = static_cast<StateId>(remap[t.from]);
            c.to = static_cast<StateId>(remap[t.to]);
            out.transitions.push_back(std::move(c));
        }
    }
    out.canonicalize();
    return out;
}

} // namespace rbcm
