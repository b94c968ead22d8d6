#include "rbcm/regular.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace rbcm {

std::size_t Dfa::add_state(bool is_final)
{
    final_states.push_back(is_final);
    next.emplace_back(alphabet.size(), 0);
    return next.size() - 1;
}

std::size_t Dfa::letter_index(char c) const
{
    auto pos = alphabet.find(c);
    if (pos == std::string::npos) {
        throw AlphabetMismatch(std::string("letter outside DFA alphabet: ") + c);
    }
    return pos;
}

std::optional<std::size_t> Dfa::run(std::size_t from, std::string_view word) const
{
    std::size_t q = from;
    for (char c : word) {
        auto pos = alphabet.find(c);
        if (pos == std::string::npos) {
            return std::nullopt;
        }
        q = next[q][pos];
    }
    return q;
}

bool Dfa::accepts(std::string_view word) const
{
    auto q = run(initial, word);
    return q && final_states[*q];
}

Dfa word_dfa(std::string_view word, std::string_view alphabet)
{
    Dfa d;
    d.alphabet = std::string(alphabet);
    for (char c : word) {
        if (alphabet.find(c) == std::string_view::npos) {
            throw AlphabetMismatch(std::string("word letter outside alphabet: ") + c);
        }
    }
    // States 0..|w| follow the word, |w|+1 is the sink.
    const std::size_t n = word.size();
    for (std::size_t i = 0; i <= n + 1; ++i) {
        d.add_state(i == n);
    }
    const std::size_t sink = n + 1;
    for (std::size_t i = 0; i <= n + 1; ++i) {
        for (std::size_t a = 0; a < alphabet.size(); ++a) {
            d.next[i][a] = (i < n && alphabet[a] == word[i]) ? i + 1 : sink;
        }
    }
    return d;
}

Dfa universal_dfa(std::string_view alphabet)
{
    Dfa d;
    d.alphabet = std::string(alphabet);
    d.add_state(true);
    return d;
}

Dfa empty_dfa(std::string_view alphabet)
{
    Dfa d;
    d.alphabet = std::string(alphabet);
    d.add_state(false);
    return d;
}

Dfa dfa_combine(const Dfa& a, const Dfa& b, DfaCombine mode)
{
    if (a.alphabet != b.alphabet) {
        throw AlphabetMismatch("DFA alphabets differ");
    }
    Dfa out;
    out.alphabet = a.alphabet;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> ids;
    std::deque<std::pair<std::size_t, std::size_t>> work;
    auto intern = [&](std::size_t p, std::size_t q) {
        auto [it, inserted] = ids.try_emplace({p, q}, 0);
        if (inserted) {
            bool fa = a.final_states[p];
            bool fb = b.final_states[q];
            bool fin = mode == DfaCombine::And ? (fa && fb) : mode == DfaCombine::Or ? (fa || fb) : (fa && !fb);
            it->second = out.add_state(fin);
            work.emplace_back(p, q);
        }
        return it->second;
    };
    out.initial = intern(a.initial, b.initial);
    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        std::size_t id = ids.at({p, q});
        for (std::size_t i = 0; i < out.alphabet.size(); ++i) {
            std::size_t target = intern(a.next[p][i], b.next[q][i]);
            out.next[id][i] = target;
        }
    }
    return out;
}

Dfa dfa_complement(const Dfa& d)
{
    Dfa out = d;
    out.final_states.flip();
    return out;
}

Dfa dfa_with_alphabet(const Dfa& d, std::string_view alphabet)
{
    Dfa out;
    out.alphabet = std::string(alphabet);
    for (char c : d.alphabet) {
        if (alphabet.find(c) == std::string_view::npos) {
            throw AlphabetMismatch(std::string("alphabet does not contain letter ") + c);
        }
    }
    for (std::size_t q = 0; q < d.num_states(); ++q) {
        out.add_state(d.final_states[q]);
    }
    std::size_t sink = out.add_state(false);
    for (std::size_t q = 0; q < out.num_states(); ++q) {
        for (std::size_t i = 0; i < alphabet.size(); ++i) {
            auto pos = d.alphabet.find(alphabet[i]);
            out.next[q][i] = (q == sink || pos == std::string::npos) ? sink : d.next[q][pos];
        }
    }
    out.initial = d.initial;
    return out;
}

Dfa dfa_minimize(const Dfa& d)
{
    // Reachable part.
    std::vector<long> order_of(d.num_states(), -1);
    std::vector<std::size_t> order{d.initial};
    order_of[d.initial] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t t : d.next[order[i]]) {
            if (order_of[t] < 0) {
                order_of[t] = static_cast<long>(order.size());
                order.push_back(t);
            }
        }
    }
    // Moore refinement: split classes by (class, successor classes) until stable.
    std::vector<std::size_t> cls(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        cls[i] = d.final_states[order[i]] ? 1 : 0;
    }
    std::size_t classes = 0;
    while (true) {
        std::map<std::vector<std::size_t>, std::size_t> signature;
        std::vector<std::size_t> refined(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            std::vector<std::size_t> sig{cls[i]};
            for (std::size_t t : d.next[order[i]]) {
                sig.push_back(cls[order_of[t]]);
            }
            refined[i] = signature.try_emplace(std::move(sig), signature.size()).first->second;
        }
        bool stable = signature.size() == classes;
        classes = signature.size();
        cls = std::move(refined);
        if (stable) {
            break;
        }
    }
    // Number classes in order of first appearance (BFS order) for a stable layout.
    std::vector<long> renumber(classes, -1);
    std::size_t counter = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (renumber[cls[i]] < 0) {
            renumber[cls[i]] = static_cast<long>(counter++);
        }
    }
    Dfa out;
    out.alphabet = d.alphabet;
    for (std::size_t c = 0; c < classes; ++c) {
        out.add_state(false);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::size_t c = renumber[cls[i]];
        out.final_states[c] = d.final_states[order[i]];
        for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
            out.next[c][a] = renumber[cls[order_of[d.next[order[i]][a]]]];
        }
    }
    out.initial = 0;
    return out;
}

bool prefix_free_check_dfa(const Dfa& d)
{
    std::vector<bool> reachable(d.num_states(), false);
    std::vector<std::size_t> stack{d.initial};
    reachable[d.initial] = true;
    while (!stack.empty()) {
        std::size_t q = stack.back();
        stack.pop_back();
        for (std::size_t t : d.next[q]) {
            if (!reachable[t]) {
                reachable[t] = true;
                stack.push_back(t);
            }
        }
    }
    for (std::size_t f = 0; f < d.num_states(); ++f) {
        if (!reachable[f] || !d.final_states[f]) {
            continue;
        }
        // Is any final state reachable from f by a non-empty path?
        std::vector<bool> seen(d.num_states(), false);
        std::vector<std::size_t> frontier(d.next[f].begin(), d.next[f].end());
        while (!frontier.empty()) {
            std::size_t q = frontier.back();
            frontier.pop_back();
            if (seen[q]) {
                continue;
            }
            seen[q] = true;
            if (d.final_states[q]) {
                return false;
            }
            frontier.insert(frontier.end(), d.next[q].begin(), d.next[q].end());
        }
    }
    return true;
}

CounterMachine dfa_to_machine(const Dfa& d, std::string_view name)
{
    CounterMachine m;
    m.name = std::string(name);
    m.counters = 0;
    m.reversal_bound = 0;
    m.alphabet = d.alphabet;
    m.marked = false;
    m.deterministic = true;
    for (std::size_t q = 0; q < d.num_states(); ++q) {
        m.add_state("d" + std::to_string(q), d.final_states[q]);
    }
    m.initial = static_cast<StateId>(d.initial);
    for (std::size_t q = 0; q < d.num_states(); ++q) {
        for (std::size_t a = 0; a < d.alphabet.size(); ++a) {
            m.add_transition(Transition{static_cast<StateId>(q), static_cast<unsigned char>(d.alphabet[a]), Guard{},
                                        static_cast<StateId>(d.next[q][a]), Move::Right, {}, ""});
        }
    }
    m.canonicalize();
    return m;
}

Dfa machine_to_dfa(const CounterMachine& m)
{
    if (m.counters != 0) {
        throw PreconditionViolated("machine has counters; it is not a finite automaton");
    }
    Dfa d;
    d.alphabet = m.alphabet;
    for (StateId q = 0; q < m.num_states(); ++q) {
        d.add_state(m.is_final(q));
    }
    std::size_t sink = d.add_state(false);
    std::vector<std::vector<bool>> set(d.num_states(), std::vector<bool>(d.alphabet.size(), false));
    for (auto& row : d.next) {
        std::fill(row.begin(), row.end(), sink);
    }
    for (const auto& t : m.transitions) {
        if (t.symbol == kEot || t.move != Move::Right) {
            throw PreconditionViolated("machine uses stay or end-marker moves; it is not a finite automaton");
        }
        std::size_t a = d.letter_index(static_cast<char>(t.symbol));
        if (set[t.from][a] && d.next[t.from][a] != t.to) {
            throw PreconditionViolated("machine is nondeterministic; it is not a DFA");
        }
        set[t.from][a] = true;
        d.next[t.from][a] = t.to;
    }
    d.initial = m.initial;
    return d;
}

UnaryDfa unary_canonicalize(const Dfa& d)
{
    if (d.alphabet.size() != 1) {
        throw PreconditionViolated("unary_canonicalize needs a one-letter alphabet");
    }
    Dfa min = dfa_minimize(d);
    std::vector<long> first_seen(min.num_states(), -1);
    UnaryDfa u;
    std::size_t q = min.initial;
    for (std::size_t i = 0;; ++i) {
        if (first_seen[q] >= 0) {
            u.tail = static_cast<std::size_t>(first_seen[q]);
            u.loop = i - u.tail;
            break;
        }
        first_seen[q] = static_cast<long>(i);
        if (min.final_states[q]) {
            u.accept.insert(i);
        }
        q = min.next[q][0];
    }
    return u;
}

Dfa unary_to_dfa(const UnaryDfa& u, char letter)
{
    Dfa d;
    d.alphabet = std::string(1, letter);
    const std::size_t n = u.tail + u.loop;
    for (std::size_t i = 0; i < n; ++i) {
        d.add_state(u.accept.count(i) != 0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        d.next[i][0] = i + 1 < n ? i + 1 : u.tail;
    }
    d.initial = 0;
    return d;
}

UnaryAlignment align_unary_family(const std::vector<UnaryDfa>& family)
{
    UnaryAlignment out;
    out.tail = 1;
    out.loop = 1;
    for (const auto& u : family) {
        out.tail = std::max(out.tail, u.tail);
        out.loop = std::lcm(out.loop, u.loop);
    }
    for (const auto& u : family) {
        UnaryDfa aligned;
        aligned.tail = out.tail;
        aligned.loop = out.loop;
        for (std::size_t p = 0; p < out.tail + out.loop; ++p) {
            if (u.accepts(p)) {
                aligned.accept.insert(p);
            }
        }
        out.members.push_back(std::move(aligned));
    }
    return out;
}

UnaryDfa periodic_to_unary(
    const std::set<std::size_t>& tail_accepts, const std::set<std::size_t>& loop_accepts, std::size_t tail,
    std::size_t loop)
{
    if (loop == 0) {
        throw PreconditionViolated("loop length must be positive");
    }
    UnaryDfa u;
    u.tail = tail;
    u.loop = loop;
    for (std::size_t p : tail_accepts) {
        if (p >= tail) {
            throw PreconditionViolated("tail position out of range");
        }
        u.accept.insert(p);
    }
    for (std::size_t p : loop_accepts) {
        if (p >= loop) {
            throw PreconditionViolated("loop position out of range");
        }
        u.accept.insert(tail + p);
    }
    return u;
}

} // namespace rbcm
