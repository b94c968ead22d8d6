#include "rbcm/decide.hpp"

#include <algorithm>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>

#include "rbcm/constructions.hpp"

namespace rbcm {

// ---------------------------------------------------------------------------
// Reversal splitting

namespace {

/// Highest sub-counter index that may be non-zero while holding `b`.
int top_phase(const CounterBudget& b)
{
    return b.direction == Direction::None ? -1 : b.reversals / 2;
}

} // namespace

CounterMachine to_one_reversal(const CounterMachine& input)
{
    if (!input.finite_budget()) {
        throw InfiniteBudget();
    }
    if (input.reversal_bound <= 1) {
        return input;
    }
    const CounterMachine m = ensure_budget_explicit(input);
    const int h = (m.reversal_bound + 2) / 2;
    const int k = m.counters;
    if (k * h > kMaxCounters) {
        throw PreconditionViolated("too many counters after splitting reversals");
    }
    CounterMachine out;
    out.name = m.name;
    out.counters = k * h;
    out.reversal_bound = 1;
    out.alphabet = m.alphabet;
    out.states = m.states;
    out.final_states = m.final_states;
    out.initial = m.initial;
    out.marked = m.marked;
    out.deterministic = m.deterministic;

    for (const auto& t : m.transitions) {
        // Sub-guard choices per original counter.
        std::vector<std::vector<std::uint32_t>> choices(k);
        for (int c = 0; c < k; ++c) {
            int top = top_phase(m.state_budgets[t.from][c]);
            if (!t.guard.is_positive(c)) {
                choices[c].push_back(0);
            } else {
                for (std::uint32_t bits = 1; bits < (1U << (top + 1)); ++bits) {
                    choices[c].push_back(bits);
                }
            }
        }
        std::vector<std::size_t> pick(k, 0);
        while (true) {
            bool any_empty = false;
            for (int c = 0; c < k; ++c) {
                any_empty = any_empty || choices[c].empty();
            }
            if (any_empty) {
                break;
            }
            Transition nt;
            nt.from = t.from;
            nt.to = t.to;
            nt.symbol = t.symbol;
            nt.move = t.move;
            nt.output = t.output;
            nt.deltas.assign(out.counters, 0);
            for (int c = 0; c < k; ++c) {
                std::uint32_t bits = choices[c][pick[c]];
                for (int j = 0; j < h; ++j) {
                    nt.guard.set_positive(c * h + j, (bits >> j) & 1U);
                }
                if (t.deltas[c] > 0) {
                    nt.deltas[c * h + m.state_budgets[t.to][c].reversals / 2] = 1;
                } else if (t.deltas[c] < 0) {
                    int newest = 31 - __builtin_clz(bits);
                    nt.deltas[c * h + newest] = -1;
                }
            }
            out.transitions.push_back(std::move(nt));
            int c = 0;
            for (; c < k; ++c) {
                if (++pick[c] < choices[c].size()) {
                    break;
                }
                pick[c] = 0;
            }
            if (c == k) {
                break;
            }
        }
    }
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Phase automaton

PhaseAutomaton build_phase_automaton(const CounterMachine& m)
{
    if (!m.finite_budget() || m.reversal_bound > 1) {
        throw PreconditionViolated("phase automaton needs counters with at most one reversal");
    }
    PhaseAutomaton p;
    p.machine = m;
    std::vector<std::vector<std::size_t>> outgoing(m.num_states());
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        outgoing[m.transitions[i].from].push_back(i);
    }
    std::map<PhaseNode, std::size_t> ids;
    std::deque<std::size_t> work;
    auto intern = [&](PhaseNode n) {
        auto [it, inserted] = ids.try_emplace(n, p.nodes.size());
        if (inserted) {
            p.nodes.push_back(std::move(n));
            work.push_back(it->second);
        }
        return it->second;
    };
    PhaseNode start{m.initial, std::vector<CounterMode>(m.counters, CounterMode::Z0), InputPhase::Reading, 0};
    p.initial = intern(start);

    while (!work.empty()) {
        const std::size_t id = work.front();
        work.pop_front();
        const PhaseNode node = p.nodes[id];
        for (std::size_t ti : outgoing[node.state]) {
            const Transition& t = m.transitions[ti];
            InputPhase phase{};
            Symbol committed = 0;
            if (node.phase == InputPhase::AtEot) {
                if (t.symbol != kEot) {
                    continue;
                }
                phase = InputPhase::AtEot;
            } else if (node.phase == InputPhase::Committed && t.symbol != node.committed) {
                continue;
            } else if (t.symbol == kEot) {
                phase = InputPhase::AtEot;
            } else if (t.move == Move::Right) {
                phase = InputPhase::Reading;
            } else {
                phase = InputPhase::Committed;
                committed = t.symbol;
            }

            std::vector<std::vector<CounterMode>> options(m.counters);
            bool possible = true;
            for (int c = 0; c < m.counters && possible; ++c) {
                CounterMode md = node.modes[c];
                bool zero_mode = md == CounterMode::Z0 || md == CounterMode::Z1;
                if (t.guard.is_positive(c) == zero_mode) {
                    possible = false;
                    break;
                }
                auto& opt = options[c];
                if (t.deltas[c] == 0) {
                    opt.push_back(md);
                } else if (t.deltas[c] > 0) {
                    if (md == CounterMode::Z0 || md == CounterMode::Pup) {
                        opt.push_back(CounterMode::Pup);
                    }
                } else if (m.reversal_bound >= 1 && (md == CounterMode::Pup || md == CounterMode::Pdown)) {
                    opt.push_back(CounterMode::Pdown);
                    opt.push_back(CounterMode::Z1);
                }
                possible = !opt.empty();
            }
            if (!possible) {
                continue;
            }
            std::vector<std::size_t> pick(m.counters, 0);
            while (true) {
                PhaseNode next{t.to, std::vector<CounterMode>(m.counters), phase, committed};
                for (int c = 0; c < m.counters; ++c) {
                    next.modes[c] = options[c][pick[c]];
                }
                std::size_t to = intern(std::move(next));
                p.edges.push_back(PhaseEdge{id, to, ti});
                int c = 0;
                for (; c < m.counters; ++c) {
                    if (++pick[c] < options[c].size()) {
                        break;
                    }
                    pick[c] = 0;
                }
                if (c == m.counters) {
                    break;
                }
            }
        }
    }
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        if (m.is_final(p.nodes[i].state) && p.nodes[i].phase != InputPhase::Committed) {
            p.accepting.push_back(i);
        }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Path images by state elimination

namespace {

/// Parikh images of the paths from p.initial to each target group, with
/// edge labels given by `label`.
std::vector<SemilinearSet> path_images(
    const PhaseAutomaton& p, const std::vector<std::vector<std::size_t>>& targets, std::size_t dim,
    const std::function<Vec(const PhaseEdge&)>& label)
{
    const std::size_t n = p.nodes.size();
    const std::size_t source = n;
    const std::size_t total = n + 1 + targets.size();
    std::vector<std::map<std::size_t, SemilinearSet>> out(total);
    std::vector<std::set<std::size_t>> in(total);
    auto add_edge = [&](std::size_t u, std::size_t v, const SemilinearSet& s) {
        auto it = out[u].find(v);
        if (it == out[u].end()) {
            out[u].emplace(v, s);
        } else {
            it->second = set_union(it->second, s);
        }
        in[v].insert(u);
    };
    add_edge(source, p.initial, SemilinearSet::zero(dim));
    for (const auto& e : p.edges) {
        add_edge(e.from, e.to, SemilinearSet::point(label(e)));
    }
    for (std::size_t g = 0; g < targets.size(); ++g) {
        for (std::size_t a : targets[g]) {
            add_edge(a, n + 1 + g, SemilinearSet::zero(dim));
        }
    }

    // Trim to nodes on some source-to-target path.
    std::vector<bool> fwd(total, false), bwd(total, false);
    std::vector<std::size_t> stack{source};
    fwd[source] = true;
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, unused] : out[u]) {
            if (!fwd[v]) {
                fwd[v] = true;
                stack.push_back(v);
            }
        }
    }
    for (std::size_t g = 0; g < targets.size(); ++g) {
        bwd[n + 1 + g] = true;
        stack.push_back(n + 1 + g);
    }
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t u : in[v]) {
            if (!bwd[u]) {
                bwd[u] = true;
                stack.push_back(u);
            }
        }
    }
    std::vector<bool> alive(total);
    for (std::size_t v = 0; v < total; ++v) {
        alive[v] = fwd[v] && bwd[v];
    }
    for (std::size_t v = 0; v < total; ++v) {
        if (!alive[v]) {
            for (const auto& [w, unused] : out[v]) {
                in[w].erase(v);
            }
            out[v].clear();
            in[v].clear();
            continue;
        }
        std::erase_if(out[v], [&](const auto& kv) { return !alive[kv.first]; });
        std::erase_if(in[v], [&](std::size_t u) { return !alive[u]; });
    }

    std::set<std::size_t> pending;
    for (std::size_t v = 0; v < n; ++v) {
        if (alive[v]) {
            pending.insert(v);
        }
    }
    while (!pending.empty()) {
        std::size_t best = *pending.begin();
        std::size_t best_cost = static_cast<std::size_t>(-1);
        for (std::size_t v : pending) {
            std::size_t ins = in[v].size() - in[v].count(v);
            std::size_t outs = out[v].size() - out[v].count(v);
            if (ins * outs < best_cost) {
                best_cost = ins * outs;
                best = v;
            }
        }
        const std::size_t v = best;
        pending.erase(v);
        SemilinearSet loop = SemilinearSet::zero(dim);
        if (auto it = out[v].find(v); it != out[v].end()) {
            loop = set_star(it->second);
            out[v].erase(it);
            in[v].erase(v);
        }
        std::vector<std::pair<std::size_t, SemilinearSet>> preds;
        for (std::size_t u : in[v]) {
            preds.emplace_back(u, set_sum(out[u].at(v), loop));
        }
        for (auto& [u, prefix] : preds) {
            out[u].erase(v);
            for (const auto& [w, suffix] : out[v]) {
                add_edge(u, w, set_sum(prefix, suffix));
            }
        }
        for (const auto& [w, unused] : out[v]) {
            in[w].erase(v);
        }
        out[v].clear();
        in[v].clear();
    }

    std::vector<SemilinearSet> result;
    for (std::size_t g = 0; g < targets.size(); ++g) {
        auto it = out[source].find(n + 1 + g);
        result.push_back(it == out[source].end() ? SemilinearSet::empty(dim) : it->second);
    }
    return result;
}

enum class EndClass : std::uint8_t { Free, Falling, Returned };

/// Accepting nodes grouped by which counters carry an end constraint, with
/// the edge labelling used for them.
struct Analysis {
    PhaseAutomaton automaton;
    std::vector<std::vector<EndClass>> classes;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<int> tracked; // counters with inc/dec coordinates
    bool letters = false;
    bool length = false;
    std::size_t letter_base = 0;
    std::size_t length_dim = 0;
    std::size_t counter_base = 0;
    std::size_t dim = 0;
    std::vector<SemilinearSet> images;

    Vec label(const PhaseEdge& e) const
    {
        Vec v(dim, 0);
        const Transition& t = automaton.machine.transitions[e.transition];
        if (t.move == Move::Right && t.symbol != kEot) {
            if (letters) {
                ++v[letter_base + automaton.machine.alphabet.find(static_cast<char>(t.symbol))];
            }
            if (length) {
                ++v[length_dim];
            }
        }
        for (std::size_t i = 0; i < tracked.size(); ++i) {
            int d = t.deltas[tracked[i]];
            if (d > 0) {
                ++v[counter_base + 2 * i];
            } else if (d < 0) {
                ++v[counter_base + 2 * i + 1];
            }
        }
        return v;
    }

    std::vector<LinearConstraint> constraints(std::size_t g) const
    {
        std::vector<LinearConstraint> cs;
        for (std::size_t i = 0; i < tracked.size(); ++i) {
            EndClass cls = classes[g][tracked[i]];
            if (cls == EndClass::Free) {
                continue;
            }
            LinearConstraint c;
            c.coeffs.assign(dim, 0);
            c.coeffs[counter_base + 2 * i] = 1;
            c.coeffs[counter_base + 2 * i + 1] = -1;
            c.relation = cls == EndClass::Returned ? Relation::Eq : Relation::Ge;
            c.rhs = cls == EndClass::Returned ? 0 : 1;
            cs.push_back(std::move(c));
        }
        return cs;
    }
};

CounterMachine one_reversal_form(const CounterMachine& m)
{
    if (!m.finite_budget()) {
        throw InfiniteBudget();
    }
    return m.reversal_bound > 1 ? to_one_reversal(m) : m;
}

Analysis analyse(const CounterMachine& m, bool letters, bool length)
{
    Analysis a;
    a.automaton = build_phase_automaton(one_reversal_form(m));
    const int k = a.automaton.machine.counters;
    std::map<std::vector<EndClass>, std::size_t> group_of;
    for (std::size_t node : a.automaton.accepting) {
        std::vector<EndClass> cls(k, EndClass::Free);
        for (int c = 0; c < k; ++c) {
            CounterMode md = a.automaton.nodes[node].modes[c];
            if (md == CounterMode::Pdown) {
                cls[c] = EndClass::Falling;
            } else if (md == CounterMode::Z1) {
                cls[c] = EndClass::Returned;
            }
        }
        auto [it, inserted] = group_of.try_emplace(cls, a.groups.size());
        if (inserted) {
            a.classes.push_back(cls);
            a.groups.emplace_back();
        }
        a.groups[it->second].push_back(node);
    }
    for (int c = 0; c < k; ++c) {
        bool used = std::any_of(a.classes.begin(), a.classes.end(),
                                [&](const auto& cls) { return cls[c] != EndClass::Free; });
        if (used) {
            a.tracked.push_back(c);
        }
    }
    a.letters = letters;
    a.length = length;
    std::size_t next = 0;
    a.letter_base = next;
    if (letters) {
        next += a.automaton.machine.alphabet.size();
    }
    a.length_dim = next;
    if (length) {
        ++next;
    }
    a.counter_base = next;
    next += 2 * a.tracked.size();
    a.dim = next;
    a.images = path_images(a.automaton, a.groups, a.dim, [&](const PhaseEdge& e) { return a.label(e); });
    return a;
}

Vec evaluate(const LinearSet& s, const std::vector<long long>& multipliers)
{
    Vec x = s.base;
    for (std::size_t j = 0; j < s.periods.size(); ++j) {
        for (std::size_t d = 0; d < x.size(); ++d) {
            x[d] += multipliers[j] * s.periods[j][d];
        }
    }
    return x;
}

/// Path from the initial node to a node of `group` whose label sum is x.
std::vector<std::size_t> realize(const Analysis& a, std::size_t group, const Vec& x)
{
    const PhaseAutomaton& p = a.automaton;
    std::vector<std::vector<std::size_t>> outgoing(p.nodes.size());
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        outgoing[p.edges[i].from].push_back(i);
    }
    std::vector<Vec> labels;
    labels.reserve(p.edges.size());
    for (const auto& e : p.edges) {
        labels.push_back(a.label(e));
    }
    std::set<std::size_t> goal(a.groups[group].begin(), a.groups[group].end());

    using Key = std::pair<std::size_t, Vec>;
    std::map<Key, std::pair<Key, std::size_t>> parent;
    std::deque<Key> queue;
    Key start{p.initial, Vec(a.dim, 0)};
    parent.emplace(start, std::make_pair(start, static_cast<std::size_t>(-1)));
    queue.push_back(start);
    while (!queue.empty()) {
        Key cur = std::move(queue.front());
        queue.pop_front();
        if (goal.count(cur.first) && cur.second == x) {
            std::vector<std::size_t> path;
            Key walk = cur;
            while (walk != start) {
                const auto& [prev, edge] = parent.at(walk);
                path.push_back(edge);
                walk = prev;
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (std::size_t ei : outgoing[cur.first]) {
            Vec used = cur.second;
            bool within = true;
            for (std::size_t d = 0; d < used.size() && within; ++d) {
                used[d] += labels[ei][d];
                within = used[d] <= x[d];
            }
            if (!within) {
                continue;
            }
            Key next{p.edges[ei].to, std::move(used)};
            if (parent.try_emplace(next, std::make_pair(cur, ei)).second) {
                queue.push_back(std::move(next));
            }
        }
    }
    throw Error("internal: feasible edge-count vector has no realizing path");
}

/// Replays a phase-automaton path on the machine and returns the word read.
std::string replay(const PhaseAutomaton& p, const std::vector<std::size_t>& path)
{
    const CounterMachine& m = p.machine;
    std::string word;
    for (std::size_t ei : path) {
        const Transition& t = m.transitions[p.edges[ei].transition];
        if (t.move == Move::Right && t.symbol != kEot) {
            word += static_cast<char>(t.symbol);
        }
    }
    Configuration c = initial_configuration(m);
    for (std::size_t ei : path) {
        const Transition& t = m.transitions[p.edges[ei].transition];
        if (head_symbol(word, c.consumed) != t.symbol) {
            throw Error("internal: witness path reads the wrong symbol");
        }
        auto next = apply_transition(m, c, t);
        if (!next) {
            throw Error("internal: witness path is not executable");
        }
        c = std::move(*next);
    }
    if (c.consumed != word.size() || !m.is_final(c.state)) {
        throw Error("internal: witness path does not accept");
    }
    return word;
}

} // namespace

SemilinearSet parikh_edges(const PhaseAutomaton& p, std::size_t target)
{
    const std::size_t dim = p.edges.size();
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> edge_id;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        edge_id.emplace(std::make_tuple(p.edges[i].from, p.edges[i].to, p.edges[i].transition), i);
    }
    auto label = [&](const PhaseEdge& e) {
        Vec v(dim, 0);
        v[edge_id.at({e.from, e.to, e.transition})] = 1;
        return v;
    };
    return path_images(p, {{target}}, dim, label).front();
}

EmptinessResult is_empty(const CounterMachine& m)
{
    Analysis a = analyse(m, false, false);
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        auto cs = a.constraints(g);
        for (const auto& component : a.images[g].components) {
            auto sol = linear_feasible(component, cs);
            if (!sol) {
                continue;
            }
            auto path = realize(a, g, evaluate(component, *sol));
            return EmptinessResult{false, replay(a.automaton, path)};
        }
    }
    return EmptinessResult{true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Membership and enumeration

namespace {

bool in_alphabet(const CounterMachine& m, std::string_view word)
{
    return std::all_of(word.begin(), word.end(), [&](char c) { return m.alphabet.find(c) != std::string::npos; });
}

bool member_with(const CounterMachine& m, std::string_view word, bool deterministic)
{
    if (!in_alphabet(m, word)) {
        return false;
    }
    if (deterministic) {
        RunOptions opts;
        opts.record_trace = false;
        return run_deterministic(m, word, opts).verdict == Verdict::Accept;
    }
    if (auto quick = accepts_by_search(m, word)) {
        return *quick;
    }
    return !is_empty(intersect_regular(m, word_dfa(word, m.alphabet))).empty;
}

std::string sorted_alphabet(std::string_view alphabet)
{
    std::string s(alphabet);
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

bool member(const CounterMachine& m, std::string_view word)
{
    return member_with(m, word, structurally_deterministic(m));
}

std::vector<std::string> all_words(std::string_view alphabet, std::size_t max_len)
{
    const std::string letters = sorted_alphabet(alphabet);
    std::vector<std::string> words{""};
    std::size_t level_start = 0;
    for (std::size_t len = 1; len <= max_len && !letters.empty(); ++len) {
        std::size_t level_end = words.size();
        for (std::size_t i = level_start; i < level_end; ++i) {
            for (char c : letters) {
                words.push_back(words[i] + c);
            }
        }
        level_start = level_end;
    }
    return words;
}

std::vector<std::string> enumerate_words(const CounterMachine& m, std::size_t max_len)
{
    const auto words = all_words(m.alphabet, max_len);
    const bool det = structurally_deterministic(m);
    std::vector<char> accepted(words.size(), 0);
    std::exception_ptr failure;
    std::mutex failure_lock;
    const long n = static_cast<long>(words.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
        try {
            accepted[i] = member_with(m, words[i], det) ? 1 : 0;
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_lock);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (accepted[i]) {
            out.push_back(words[i]);
        }
    }
    return out;
}

std::vector<std::string> enumerate_words_serial(const CounterMachine& m, std::size_t max_len)
{
    const bool det = structurally_deterministic(m);
    std::vector<std::string> out;
    for (const auto& w : all_words(m.alphabet, max_len)) {
        if (member_with(m, w, det)) {
            out.push_back(w);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

bool is_infinite(const CounterMachine& m)
{
    Analysis a = analyse(m, false, true);
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        auto cs = a.constraints(g);
        // Directions keep equalities and may only grow the falling margin.
        auto dir_cs = cs;
        for (auto& c : dir_cs) {
            c.rhs = 0;
        }
        LinearConstraint longer;
        longer.coeffs.assign(a.dim, 0);
        longer.coeffs[a.length_dim] = 1;
        longer.relation = Relation::Ge;
        longer.rhs = 1;
        dir_cs.push_back(longer);
        for (const auto& component : a.images[g].components) {
            if (!linear_feasible(component, cs)) {
                continue;
            }
            LinearSet directions{Vec(a.dim, 0), component.periods};
            if (linear_feasible(directions, dir_cs)) {
                return true;
            }
        }
    }
    return false;
}

SemilinearSet parikh_image(const CounterMachine& m)
{
    Analysis a = analyse(m, true, false);
    const std::size_t letters = a.automaton.machine.alphabet.size();
    std::vector<std::size_t> keep(letters);
    for (std::size_t i = 0; i < letters; ++i) {
        keep[i] = a.letter_base + i;
    }
    SemilinearSet result = SemilinearSet::empty(letters);
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
        auto cs = a.constraints(g);
        for (const auto& component : a.images[g].components) {
            result = set_union(result, project(constrained_image(component, cs), keep));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

CompareResult compare(const CounterMachine& m1, const CounterMachine& m2, CompareMode mode)
{
    auto subset = [](const CounterMachine& a, const CounterMachine& b) {
        if (!structurally_deterministic(b)) {
            throw NondeterministicInput("inclusion needs a deterministic right-hand machine");
        }
        const std::string alphabet = alphabet_union(a.alphabet, b.alphabet);
        CounterMachine outside = complement_dcm(with_alphabet(b, alphabet));
        auto r = is_empty(intersect_machines(with_alphabet(a, alphabet), outside));
        return CompareResult{r.empty, r.witness};
    };
    CompareResult forward = subset(m1, m2);
    if (mode == CompareMode::Subset || !forward.holds) {
        return forward;
    }
    return subset(m2, m1);
}

bool prefix_free_check_machine(const CounterMachine& m)
{
    if (!m.finite_budget()) {
        throw InfiniteBudget();
    }
    Dfa nonempty = dfa_complement(word_dfa("", m.alphabet));
    CounterMachine extended = concat_ncm(m, dfa_to_machine(nonempty, "nonempty"));
    return is_empty(intersect_machines(m, extended)).empty;
}

// ---------------------------------------------------------------------------
// End-marker behaviour of one-counter machines

bool end_marker_accepts(const CounterMachine& m, StateId q, long long i)
{
    Configuration c;
    c.state = q;
    c.values.assign(m.counters, 0);
    c.budgets.assign(m.counters, CounterBudget{});
    if (m.counters > 0) {
        c.values[0] = i;
    }
    RunOptions opts;
    opts.record_trace = false;
    return run_deterministic_from(m, c, "", opts).verdict == Verdict::Accept;
}

UnaryDfa end_marker_behavior(const CounterMachine& m, StateId q)
{
    if (m.counters != 1 || !m.marked || !structurally_deterministic(m)) {
        throw PreconditionViolated("end_marker_behavior needs a marked deterministic one-counter machine");
    }
    if (q >= m.num_states()) {
        throw PreconditionViolated("state out of range");
    }
    if (!m.finite_budget()) {
        throw InfiniteBudget();
    }
    // Follow the end-marker run while the counter stays positive. The walk
    // does not depend on the value, so once (state, budget) repeats it
    // cycles with a fixed net change.
    TransitionIndex index(m);
    const std::size_t eot = m.alphabet.size();
    std::map<std::pair<StateId, CounterBudget>, std::size_t> seen;
    StateId state = q;
    CounterBudget budget;
    long long sum = 0;
    std::vector<long long> sums{0};
    long long period = 1;
    std::size_t steps = 0;
    while (true) {
        if (m.is_final(state)) {
            break;
        }
        auto [it, inserted] = seen.try_emplace({state, budget}, steps);
        if (!inserted) {
            long long net = sum - sums[it->second];
            if (net < 0) {
                period = -net;
            }
            break;
        }
        const auto& candidates = index.at(state, eot, Guard{1});
        if (candidates.empty()) {
            break;
        }
        const Transition& t = m.transitions[candidates.front()];
        CounterBudget next = budget;
        int d = t.deltas[0];
        if (d != 0) {
            Direction dir = d > 0 ? Direction::Up : Direction::Down;
            if (next.direction != Direction::None && next.direction != dir) {
                ++next.reversals;
            }
            next.direction = dir;
            if (next.reversals > m.reversal_bound) {
                break;
            }
        }
        budget = next;
        state = t.to;
        sum += d;
        sums.push_back(sum);
        ++steps;
    }
    const std::size_t tail = steps + 1;
    const std::size_t loop = static_cast<std::size_t>(period);
    UnaryDfa u;
    u.tail = tail;
    u.loop = loop;
    for (std::size_t i = 0; i < tail + loop; ++i) {
        if (end_marker_accepts(m, q, static_cast<long long>(i))) {
            u.accept.insert(i);
        }
    }
    return unary_canonicalize(unary_to_dfa(u));
}

} // namespace rbcm
