#include "rbcm/transduce.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "construct_util.hpp"

namespace rbcm {

using namespace detail;

std::size_t CounterTransducer::buffer_bound() const
{
    std::size_t longest = 0;
    for (const auto& t : machine.transitions) {
        longest = std::max(longest, t.output.size());
    }
    return longest + 1;
}

ValidationReport validate_transducer(const CounterTransducer& a)
{
    ValidationReport report = validate_machine(a.machine);
    for (const auto& t : a.machine.transitions) {
        for (char c : t.output) {
            if (a.output_alphabet.find(c) == std::string::npos) {
                report.violations.push_back(std::string("output symbol outside the output alphabet: ") + c);
            }
        }
        if (a.machine.deterministic && t.symbol == kEot && t.from < a.machine.num_states() &&
            a.machine.is_final(t.from)) {
            report.violations.push_back("deterministic transducer has an end-marker transition from final state " +
                                        a.machine.states[t.from]);
        }
    }
    return report;
}

std::optional<std::string> transduce_det(const CounterTransducer& a, std::string_view w)
{
    for (char c : w) {
        if (a.machine.alphabet.find(c) == std::string::npos) {
            return std::nullopt;
        }
    }
    RunOptions opts;
    opts.record_trace = false;
    RunTrace trace = run_deterministic(a.machine, w, opts);
    if (trace.verdict != Verdict::Accept) {
        return std::nullopt;
    }
    return trace.output;
}

namespace {

void require_output_alphabet(const CounterTransducer& a, const CounterMachine& m)
{
    for (char c : a.output_alphabet) {
        if (m.alphabet.find(c) == std::string::npos) {
            throw AlphabetMismatch(std::string("transducer output letter missing from the machine alphabet: ") + c);
        }
    }
}

} // namespace

CounterMachine inverse_apply(const CounterTransducer& a_in, const CounterMachine& m_in)
{
    require_output_alphabet(a_in, m_in);
    int bound = 0;
    auto [a, m] = align_budgets(a_in.machine, m_in, bound);
    const bool a_det = structurally_deterministic(a);
    const int ka = a.counters;
    const int km = m.counters;
    if (ka + km > kMaxCounters) {
        throw PreconditionViolated("inverse transduction needs too many counters");
    }
    CounterMachine out;
    out.name = "inv_" + a.name + "_" + m.name;
    out.counters = ka + km;
    out.reversal_bound = bound;
    out.alphabet = a.alphabet;
    out.marked = true;
    out.deterministic = a_det && structurally_deterministic(m);

    // (transducer state, machine state, buffered output, sealed)
    using Key = std::tuple<StateId, StateId, std::string, bool>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId qa, StateId qm, std::string buffer, bool sealed) {
        std::string name = a.states[qa] + "|" + m.states[qm];
        if (sealed) {
            name += "|$";
        } else if (!buffer.empty()) {
            name += "|" + buffer;
        }
        auto [id, fresh] = table.intern({qa, qm, std::move(buffer), sealed}, name, sealed && m.is_final(qm));
        if (fresh) {
            work.push_back(id);
        }
        return id;
    };
    const auto out_a = outgoing_of(a);
    const auto out_m = outgoing_of(m);
    const auto symbols = symbols_of(out);
    const std::vector<int> zero_a(ka, 0);
    const std::vector<int> zero_m(km, 0);
    out.initial = intern(a.initial, m.initial, "", false);
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [qa, qm, buffer, sealed] = table.key(id);
        if (sealed) {
            // m finishes on the end marker of the output.
            for (std::size_t ti : out_m[qm]) {
                const Transition& t = m.transitions[ti];
                if (t.symbol != kEot) {
                    continue;
                }
                StateId to = intern(qa, t.to, "", true);
                for (std::uint32_t g = 0; g < (1U << ka); ++g) {
                    out.transitions.push_back(Transition{id, kEot, join_guards(Guard{g}, t.guard, ka), to, Move::Stay,
                                                         concat_deltas(zero_a, t.deltas), ""});
                }
            }
            continue;
        }
        if (!buffer.empty()) {
            // m reads the first buffered letter while the input head rests.
            const Symbol head = static_cast<unsigned char>(buffer.front());
            for (std::size_t ti : out_m[qm]) {
                const Transition& t = m.transitions[ti];
                if (t.symbol != head) {
                    continue;
                }
                StateId to = intern(qa, t.to, t.move == Move::Right ? buffer.substr(1) : buffer, false);
                for (std::uint32_t g = 0; g < (1U << ka); ++g) {
                    for (Symbol s : symbols) {
                        out.transitions.push_back(Transition{id, s, join_guards(Guard{g}, t.guard, ka), to,
                                                             Move::Stay, concat_deltas(zero_a, t.deltas), ""});
                    }
                }
            }
            continue;
        }
        for (std::size_t ti : out_a[qa]) {
            const Transition& t = a.transitions[ti];
            if (t.symbol == kEot && a_det && a.is_final(qa)) {
                continue; // the output is fixed once the transducer accepts
            }
            StateId to = intern(t.to, qm, t.output, false);
            for (std::uint32_t g = 0; g < (1U << km); ++g) {
                out.transitions.push_back(Transition{id, t.symbol, join_guards(t.guard, Guard{g}, ka), to, t.move,
                                                     concat_deltas(t.deltas, zero_m), ""});
            }
        }
        if (a.is_final(qa)) {
            StateId to = intern(qa, qm, "", true);
            for (std::uint32_t g = 0; g < out.num_guards(); ++g) {
                out.transitions.push_back(
                    Transition{id, kEot, Guard{g}, to, Move::Stay, std::vector<int>(out.counters, 0), ""});
            }
        }
    }
    out.canonicalize();
    return out;
}

CounterMachine forward_image_ncm(const CounterTransducer& a_in, const CounterMachine& m_in)
{
    int bound = 0;
    auto [a, m] = align_budgets(a_in.machine, m_in, bound);
    const int ka = a.counters;
    const int km = m.counters;
    if (ka + km > kMaxCounters) {
        throw PreconditionViolated("forward image needs too many counters");
    }
    CounterMachine out;
    out.name = "img_" + a.name + "_" + m.name;
    out.counters = ka + km;
    out.reversal_bound = bound;
    out.alphabet = a_in.output_alphabet;
    out.marked = true;
    out.deterministic = false;

    // The input word of a and m is guessed one symbol at a time. virt is
    // the guessed symbol (kNone before a guess); a_flag/m_flag mean "moved
    // past it" for letters and "stopped in a final state" at the end marker.
    constexpr int kNone = -2;
    using Key = std::tuple<StateId, StateId, int, bool, bool, std::string>;
    StateTable<Key> table(out);
    std::deque<StateId> work;
    auto intern = [&](StateId qa, StateId qm, int virt, bool a_flag, bool m_flag, std::string buffer) {
        std::string name = a.states[qa] + "|" + m.states[qm] + "|";
        name += virt == kNone ? std::string("?") : virt == kEot ? std::string("$") : std::string(1, char(virt));
        name += std::string(a_flag ? "A" : "") + (m_flag ? "M" : "");
        if (!buffer.empty()) {
            name += "|" + buffer;
        }
        bool fin = virt == kEot && a_flag && m_flag && buffer.empty();
        auto [id, fresh] = table.intern({qa, qm, virt, a_flag, m_flag, std::move(buffer)}, name, fin);
        if (fresh) {
            work.push_back(id);
        }
        return id;
    };
    const auto out_a = outgoing_of(a);
    const auto out_m = outgoing_of(m);
    const auto real_symbols = symbols_of(out);
    const std::vector<int> zero_a(ka, 0);
    const std::vector<int> zero_m(km, 0);
    const std::vector<int> zero_all(ka + km, 0);
    auto neutral = [&](StateId from, StateId to) {
        for (std::uint32_t g = 0; g < out.num_guards(); ++g) {
            for (Symbol s : real_symbols) {
                out.transitions.push_back(Transition{from, s, Guard{g}, to, Move::Stay, zero_all, ""});
            }
        }
    };
    out.initial = intern(a.initial, m.initial, kNone, false, false, "");
    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        auto [qa, qm, virt, a_flag, m_flag, buffer] = table.key(id);
        if (!buffer.empty()) {
            const Symbol head = static_cast<unsigned char>(buffer.front());
            if (out.alphabet.find(buffer.front()) == std::string::npos) {
                continue;
            }
            StateId to = intern(qa, qm, virt, a_flag, m_flag, buffer.substr(1));
            for (std::uint32_t g = 0; g < out.num_guards(); ++g) {
                out.transitions.push_back(Transition{id, head, Guard{g}, to, Move::Right, zero_all, ""});
            }
            continue;
        }
        if (virt == kNone) {
            for (Symbol s : symbols_of(a)) {
                neutral(id, intern(qa, qm, s, false, false, ""));
            }
            continue;
        }
        const bool at_end = virt == kEot;
        if (!at_end && a_flag && m_flag) {
            neutral(id, intern(qa, qm, kNone, false, false, ""));
            continue;
        }
        if (!a_flag) {
            for (std::size_t ti : out_a[qa]) {
                const Transition& t = a.transitions[ti];
                if (t.symbol != virt) {
                    continue;
                }
                StateId to = intern(t.to, qm, virt, !at_end && t.move == Move::Right, m_flag, t.output);
                for (std::uint32_t g = 0; g < (1U << km); ++g) {
                    for (Symbol s : real_symbols) {
                        out.transitions.push_back(Transition{id, s, join_guards(t.guard, Guard{g}, ka), to,
                                                             Move::Stay, concat_deltas(t.deltas, zero_m), ""});
                    }
                }
            }
            if (at_end && a.is_final(qa)) {
                neutral(id, intern(qa, qm, virt, true, m_flag, ""));
            }
        }
        if (!m_flag) {
            for (std::size_t ti : out_m[qm]) {
                const Transition& t = m.transitions[ti];
                if (t.symbol != virt) {
                    continue;
                }
                StateId to = intern(qa, t.to, virt, a_flag, !at_end && t.move == Move::Right, "");
                for (std::uint32_t g = 0; g < (1U << ka); ++g) {
                    for (Symbol s : real_symbols) {
                        out.transitions.push_back(Transition{id, s, join_guards(Guard{g}, t.guard, ka), to,
                                                             Move::Stay, concat_deltas(zero_a, t.deltas), ""});
                    }
                }
            }
            if (at_end && m.is_final(qm)) {
                neutral(id, intern(qa, qm, virt, a_flag, true, ""));
            }
        }
    }
    out.canonicalize();
    return trim_unreachable(out);
}

CounterTransducer to_null_transducer(const CounterMachine& m)
{
    if (!structurally_deterministic(m)) {
        throw NondeterministicInput("null transducer needs a deterministic machine");
    }
    CounterTransducer a;
    a.machine = m;
    a.machine.name = "null_" + m.name;
    a.machine.deterministic = true;
    a.machine.marked = true;
    std::erase_if(a.machine.transitions,
                  [&](const Transition& t) { return t.symbol == kEot && m.is_final(t.from); });
    for (auto& t : a.machine.transitions) {
        t.output.clear();
    }
    return a;
}

CounterMachine lambda_acceptor(std::string_view alphabet)
{
    CounterMachine m;
    m.name = "lambda";
    m.counters = 0;
    m.reversal_bound = 0;
    m.alphabet = std::string(alphabet);
    m.marked = true;
    m.add_state("l0", true);
    return m;
}

} // namespace rbcm
