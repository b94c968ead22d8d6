#pragma once

// Finite automata used alongside counter machines: complete DFAs, Boolean
// combinations, prefix-freeness, and the tail/loop form of unary DFAs.

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rbcm/machine.hpp"

namespace rbcm {

/// Complete deterministic finite automaton. next[q][i] is the successor of
/// state q on alphabet[i].
struct Dfa {
    std::string alphabet;
    std::size_t initial = 0;
    std::vector<bool> final_states;
    std::vector<std::vector<std::size_t>> next;

    std::size_t num_states() const noexcept { return next.size(); }
    std::size_t add_state(bool is_final);
    std::size_t letter_index(char c) const;
    bool accepts(std::string_view word) const;
    /// State after reading word from `from`; nullopt if a letter is foreign.
    std::optional<std::size_t> run(std::size_t from, std::string_view word) const;
};

Dfa word_dfa(std::string_view word, std::string_view alphabet);
Dfa universal_dfa(std::string_view alphabet);
Dfa empty_dfa(std::string_view alphabet);

enum class DfaCombine { And, Or, Diff };
Dfa dfa_combine(const Dfa& a, const Dfa& b, DfaCombine mode);
Dfa dfa_complement(const Dfa& d);

/// Extends the alphabet; new letters lead to a fresh sink.
Dfa dfa_with_alphabet(const Dfa& d, std::string_view alphabet);

/// Partition-refinement minimization restricted to reachable states.
Dfa dfa_minimize(const Dfa& d);

bool prefix_free_check_dfa(const Dfa& d);

/// A 0-counter unmarked machine with the same language.
CounterMachine dfa_to_machine(const Dfa& d, std::string_view name = "dfa");

/// Reads a 0-counter machine that only moves right as a DFA.
Dfa machine_to_dfa(const CounterMachine& m);

/// Unary regular language in tail/loop form: position i < tail stands for
/// a^i, positions tail..tail+loop-1 form the cycle.
struct UnaryDfa {
    std::size_t tail = 0;
    std::size_t loop = 1;
    std::set<std::size_t> accept;

    std::size_t position(std::size_t i) const noexcept { return i < tail ? i : tail + (i - tail) % loop; }
    bool accepts(std::size_t i) const { return accept.count(position(i)) != 0; }
    bool operator==(const UnaryDfa&) const = default;
};

UnaryDfa unary_canonicalize(const Dfa& d);
Dfa unary_to_dfa(const UnaryDfa& u, char letter = 'a');

struct UnaryAlignment {
    std::size_t tail = 1;
    std::size_t loop = 1;
    std::vector<UnaryDfa> members; // each re-expressed over (tail, loop)
};

UnaryAlignment align_unary_family(const std::vector<UnaryDfa>& family);

UnaryDfa periodic_to_unary(
    const std::set<std::size_t>& tail_accepts, const std::set<std::size_t>& loop_accepts, std::size_t tail,
    std::size_t loop);

} // namespace rbcm
