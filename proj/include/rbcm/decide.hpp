#pragma once

// Decision procedures: emptiness (with witnesses), membership, word
// enumeration, infiniteness, inclusion/equality, prefix-freeness, Parikh
// images, and the end-marker behaviour of one-counter machines.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rbcm/machine.hpp"
#include "rbcm/regular.hpp"
#include "rbcm/semilinear.hpp"

namespace rbcm {

/// Replaces every counter of a budget-explicit machine by one 1-reversal
/// sub-counter per increasing phase. Machines with l <= 1 come back
/// unchanged.
CounterMachine to_one_reversal(const CounterMachine& m);

/// Z0: never left zero. Pup: rising. Pdown: falling, still positive.
/// Z1: back at zero for good.
enum class CounterMode : std::uint8_t { Z0, Pup, Pdown, Z1 };

/// Reading: next symbol not fixed yet. Committed: a stay on `committed`
/// was taken, so the next right move must read it. AtEot: the end marker
/// has been seen.
enum class InputPhase : std::uint8_t { Reading, Committed, AtEot };

struct PhaseNode {
    StateId state = 0;
    std::vector<CounterMode> modes;
    InputPhase phase = InputPhase::Reading;
    Symbol committed = 0;

    auto operator<=>(const PhaseNode&) const = default;
};

struct PhaseEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t transition = 0; // index into PhaseAutomaton::machine.transitions
};

struct PhaseAutomaton {
    CounterMachine machine; // the 1-reversal machine the nodes refer to
    std::vector<PhaseNode> nodes;
    std::vector<PhaseEdge> edges;
    std::size_t initial = 0;
    std::vector<std::size_t> accepting;
};

/// Requires every counter to be at most 1-reversal.
PhaseAutomaton build_phase_automaton(const CounterMachine& m);

/// Parikh image of the edge sequences of paths from the initial node to
/// `target`. Dimension = number of edges; edge e is the unit vector e.
SemilinearSet parikh_edges(const PhaseAutomaton& p, std::size_t target);

struct EmptinessResult {
    bool empty = true;
    std::optional<std::string> witness;
};

EmptinessResult is_empty(const CounterMachine& m);

bool member(const CounterMachine& m, std::string_view word);

/// Accepted words of length <= max_len in shortlex order over the sorted
/// alphabet. Words are checked in parallel.
std::vector<std::string> enumerate_words(const CounterMachine& m, std::size_t max_len);
/// Single-threaded reference for enumerate_words.
std::vector<std::string> enumerate_words_serial(const CounterMachine& m, std::size_t max_len);

/// All words over the sorted alphabet of length <= max_len, shortlex.
std::vector<std::string> all_words(std::string_view alphabet, std::size_t max_len);

bool is_infinite(const CounterMachine& m);

enum class CompareMode : std::uint8_t { Subset, Equal };

struct CompareResult {
    bool holds = true;
    std::optional<std::string> counterexample;
};

/// m2 must be deterministic and complementable.
CompareResult compare(const CounterMachine& m1, const CounterMachine& m2, CompareMode mode);

bool prefix_free_check_machine(const CounterMachine& m);

/// For a marked deterministic one-counter machine: the set of counter
/// values i such that the end-marker run from (q, i) reaches a final state.
UnaryDfa end_marker_behavior(const CounterMachine& m, StateId q);

/// Outcome of the end-marker run from (q, i), by direct simulation.
bool end_marker_accepts(const CounterMachine& m, StateId q, long long i);

/// Letter-count image of L(m), one coordinate per alphabet letter in
/// declaration order.
SemilinearSet parikh_image(const CounterMachine& m);

} // namespace rbcm
