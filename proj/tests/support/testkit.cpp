#include "testkit.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

namespace testkit {

using namespace rbcm;

namespace {

int pick(std::mt19937& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(std::mt19937& rng, double p)
{
    return std::bernoulli_distribution(p)(rng);
}

CounterMachine draw(std::mt19937& rng, const RandomOptions& opt)
{
    CounterMachine m;
    m.name = "rand";
    const int n = pick(rng, 1, opt.max_states);
    m.counters = opt.counters ? *opt.counters : pick(rng, 0, opt.max_counters);
    m.reversal_bound = opt.reversal_bound;
    m.alphabet = std::string("ab").substr(0, pick(rng, 1, opt.max_alphabet));
    m.marked = opt.marked ? *opt.marked : chance(rng, 0.5);
    m.deterministic = true;
    for (int q = 0; q < n; ++q) {
        m.add_state("q" + std::to_string(q), chance(rng, 0.4));
    }
    m.initial = 0;
    std::vector<Symbol> symbols;
    for (char c : m.alphabet) {
        symbols.push_back(static_cast<unsigned char>(c));
    }
    if (m.marked) {
        symbols.push_back(kEot);
    }
    for (int q = 0; q < n; ++q) {
        for (Symbol s : symbols) {
            for (std::uint32_t g = 0; g < (1U << m.counters); ++g) {
                if (!chance(rng, opt.density)) {
                    continue;
                }
                Transition t;
                t.from = static_cast<StateId>(q);
                t.symbol = s;
                t.guard = Guard{g};
                t.to = static_cast<StateId>(pick(rng, 0, n - 1));
                t.move = s == kEot || chance(rng, opt.stay_rate) ? Move::Stay : Move::Right;
                for (int i = 0; i < m.counters; ++i) {
                    bool positive = (g >> i) & 1U;
                    t.deltas.push_back(pick(rng, positive ? -1 : 0, 1));
                }
                m.transitions.push_back(std::move(t));
            }
        }
    }
    m.canonicalize();
    return m;
}

} // namespace

CounterMachine random_machine(std::mt19937& rng, const RandomOptions& opt)
{
    for (;;) {
        CounterMachine m = draw(rng, opt);
        if (!opt.stay_acyclic || stay_acyclic_check(enforce_reversal_control(m))) {
            return m;
        }
    }
}

CounterMachine adversarial_stay_loop(std::mt19937& rng)
{
    RandomOptions opt;
    opt.stay_acyclic = false;
    opt.counters = pick(rng, 1, 2);
    CounterMachine m = draw(rng, opt);
    // Replace whatever the initial state does on 'a' under the all-zero and
    // all-positive guards with a self stay that increments every counter.
    const std::uint32_t all = (1U << m.counters) - 1;
    std::erase_if(m.transitions, [&](const Transition& t) {
        return t.from == m.initial && t.symbol == 'a' && (t.guard.positive == 0 || t.guard.positive == all);
    });
    StateId pump = m.add_state("pump", false);
    m.transitions.push_back(
        Transition{m.initial, 'a', Guard{0}, pump, Move::Stay, std::vector<int>(m.counters, 1), ""});
    m.transitions.push_back(Transition{pump, 'a', Guard{all}, m.initial, Move::Stay,
                                       std::vector<int>(m.counters, 1), ""});
    m.transitions.push_back(
        Transition{m.initial, 'a', Guard{all}, pump, Move::Stay, std::vector<int>(m.counters, 1), ""});
    m.canonicalize();
    return m;
}

Dfa random_dfa(std::mt19937& rng, const std::string& alphabet, int max_states)
{
    Dfa d;
    d.alphabet = alphabet;
    const int n = pick(rng, 1, max_states);
    for (int q = 0; q < n; ++q) {
        d.add_state(chance(rng, 0.5));
    }
    for (int q = 0; q < n; ++q) {
        for (std::size_t i = 0; i < alphabet.size(); ++i) {
            d.next[q][i] = static_cast<std::size_t>(pick(rng, 0, n - 1));
        }
    }
    return d;
}

RawConfig raw_start(const CounterMachine& m)
{
    const auto k = static_cast<std::size_t>(m.counters);
    return RawConfig{m.initial, 0, std::vector<long long>(k, 0), std::vector<int>(k, 0), std::vector<int>(k, 0)};
}

std::uint32_t raw_guard(const RawConfig& c)
{
    std::uint32_t g = 0;
    for (std::size_t i = 0; i < c.value.size(); ++i) {
        if (c.value[i] > 0) {
            g |= 1U << i;
        }
    }
    return g;
}

std::vector<RawConfig> raw_successors(const CounterMachine& m, const std::string& word, const RawConfig& c)
{
    std::vector<RawConfig> out;
    const int head = c.pos < word.size() ? static_cast<unsigned char>(word[c.pos]) : kEot;
    const std::uint32_t guard = raw_guard(c);
    for (const Transition& t : m.transitions) {
        if (t.from != c.state || t.symbol != head || t.guard.positive != guard) {
            continue;
        }
        if (head == kEot && t.move == Move::Right) {
            continue;
        }
        RawConfig n = c;
        n.state = t.to;
        bool ok = true;
        for (int i = 0; i < m.counters && ok; ++i) {
            const int d = t.deltas[i];
            n.value[i] += d;
            ok = n.value[i] >= 0;
            if (d != 0) {
                if (n.dir[i] != 0 && n.dir[i] != d) {
                    ++n.revs[i];
                }
                n.dir[i] = d;
                ok = ok && (m.reversal_bound < 0 || n.revs[i] <= m.reversal_bound);
            }
        }
        if (!ok) {
            continue;
        }
        if (t.move == Move::Right) {
            ++n.pos;
        }
        out.push_back(std::move(n));
    }
    return out;
}

bool oracle_accepts(const CounterMachine& m, const std::string& word, long long value_cap)
{
    RawConfig start = raw_start(m);
    std::set<RawConfig> seen{start};
    std::deque<RawConfig> queue{start};
    while (!queue.empty()) {
        RawConfig c = queue.front();
        queue.pop_front();
        if (c.pos == word.size() && m.final_states[c.state]) {
            return true;
        }
        for (RawConfig& n : raw_successors(m, word, c)) {
            bool capped = false;
            for (long long v : n.value) {
                capped = capped || v > value_cap;
            }
            if (!capped && seen.insert(n).second) {
                queue.push_back(std::move(n));
            }
        }
    }
    return false;
}

std::vector<std::string> words_upto(const std::string& alphabet, std::size_t n)
{
    std::string sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::string> out{""};
    std::size_t layer_start = 0;
    for (std::size_t len = 1; len <= n; ++len) {
        std::size_t layer_end = out.size();
        for (std::size_t i = layer_start; i < layer_end; ++i) {
            for (char c : sorted) {
                out.push_back(out[i] + c);
            }
        }
        layer_start = layer_end;
    }
    return out;
}

bool brute_prefix_free(const std::vector<std::string>& words)
{
    std::set<std::string> s(words.begin(), words.end());
    for (const auto& w : words) {
        for (std::size_t len = 0; len < w.size(); ++len) {
            if (s.count(w.substr(0, len))) {
                return false;
            }
        }
    }
    return true;
}

} // namespace testkit
