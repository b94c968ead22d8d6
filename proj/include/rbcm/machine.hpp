#pragma once

// One-way counter machines with reversal-bounded counters.
//
// A machine reads its input left to right. Each transition inspects the
// current symbol (or the end marker once the input is exhausted), the
// zero/positive status of every counter, and then moves the head (stay or
// right) while adding -1, 0 or +1 to every counter. A word is accepted when
// some reachable configuration has consumed the whole word and sits in a
// final state.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rbcm/errors.hpp"

namespace rbcm {

using StateId = std::uint32_t;

/// Input symbol. Letters are their character code; the end marker is kEot.
using Symbol = int;
inline constexpr Symbol kEot = -1;

/// Reversal bound meaning "no bound".
inline constexpr int kUnbounded = -1;

/// Upper bound on the number of counters a machine may carry.
inline constexpr int kMaxCounters = 16;

enum class Move : std::uint8_t { Stay, Right };

/// Zero/positive status of every counter. Bit i set means counter i is
/// positive.
struct Guard {
    std::uint32_t positive = 0;

    bool is_positive(int counter) const noexcept { return (positive >> counter) & 1U; }
    void set_positive(int counter, bool value) noexcept
    {
        if (value) {
            positive |= (1U << counter);
        } else {
            positive &= ~(1U << counter);
        }
    }
    static Guard of(const std::vector<long long>& values);

    auto operator<=>(const Guard&) const = default;
};

struct Transition {
    StateId from = 0;
    Symbol symbol = 0;
    Guard guard;
    StateId to = 0;
    Move move = Move::Right;
    std::vector<int> deltas;
    std::string output; // transducers only

    auto operator<=>(const Transition&) const = default;
};

enum class Direction : std::uint8_t { None, Up, Down };

/// Reversal bookkeeping for one counter.
struct CounterBudget {
    Direction direction = Direction::None;
    int reversals = 0;

    auto operator<=>(const CounterBudget&) const = default;
};

struct CounterMachine {
    std::string name = "M";
    int counters = 0;
    int reversal_bound = 1; // kUnbounded for no bound
    std::string alphabet;   // distinct letters, in declaration order
    std::vector<std::string> states;
    StateId initial = 0;
    std::vector<bool> final_states;
    std::vector<Transition> transitions;
    bool marked = true;
    bool deterministic = true;

    /// Set by enforce_reversal_control: the finite control carries the
    /// reversal bookkeeping, and state_budgets[q] is the bookkeeping every
    /// run holds while in q.
    bool budget_explicit = false;
    std::vector<std::vector<CounterBudget>> state_budgets;

    std::size_t num_states() const noexcept { return states.size(); }
    bool is_final(StateId q) const { return final_states.at(q); }
    bool finite_budget() const noexcept { return reversal_bound != kUnbounded; }

    StateId add_state(std::string state_name, bool is_final_state = false);
    void add_transition(Transition t) { transitions.push_back(std::move(t)); }

    /// Index of a letter in the alphabet, |alphabet| for the end marker, and
    /// nullopt for symbols outside the alphabet.
    std::optional<std::size_t> symbol_index(Symbol s) const;
    std::size_t num_symbols() const noexcept { return alphabet.size() + 1; }
    Symbol symbol_at(std::size_t index) const
    {
        return index == alphabet.size() ? kEot : static_cast<unsigned char>(alphabet[index]);
    }
    std::uint32_t num_guards() const noexcept { return 1U << counters; }

    /// Sorts transitions and removes exact duplicates.
    void canonicalize();

    bool operator==(const CounterMachine& other) const;
};

/// Fast lookup of the transitions applicable in (state, symbol, guard).
class TransitionIndex {
public:
    explicit TransitionIndex(const CounterMachine& m);

    /// Indices into m.transitions.
    const std::vector<std::size_t>& at(StateId q, std::size_t symbol_index, Guard g) const
    {
        return buckets_[(static_cast<std::size_t>(q) * symbols_ + symbol_index) * guards_ + g.positive];
    }

private:
    std::size_t symbols_;
    std::size_t guards_;
    std::vector<std::vector<std::size_t>> buckets_;
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate_machine(const CounterMachine& m);

/// True when no two transitions share (from, symbol, guard).
bool structurally_deterministic(const CounterMachine& m);

// ---------------------------------------------------------------------------
// Operational semantics

struct Configuration {
    StateId state = 0;
    std::size_t consumed = 0;
    std::vector<long long> values;
    std::vector<CounterBudget> budgets;

    auto operator<=>(const Configuration&) const = default;
};

Configuration initial_configuration(const CounterMachine& m);

/// Symbol under the head: the next letter of word, or kEot when all of it
/// has been consumed.
Symbol head_symbol(std::string_view word, std::size_t consumed);

/// Applies one transition to a configuration. Returns nullopt when the
/// transition does not match or would exceed the reversal bound.
std::optional<Configuration> apply_transition(
    const CounterMachine& m, const Configuration& c, const Transition& t);

/// All successors of c on the given word.
std::vector<Configuration> step(const CounterMachine& m, const Configuration& c, std::string_view word);

/// Successors of c, reusing a prebuilt index. Out-of-alphabet symbols
/// yield no successors.
std::vector<std::pair<Configuration, std::size_t>> successors(
    const CounterMachine& m, const TransitionIndex& index, const Configuration& c, std::string_view word);

enum class Verdict : std::uint8_t { Accept, Reject, Diverge };

/// Witness that a deterministic run loops forever: the configurations at
/// steps first and second share state, guard and budgets, no input is read
/// in between, every counter grows by growth[i] >= 0, and counters that grow
/// stay positive on the whole segment.
struct DivergenceCertificate {
    std::size_t first = 0;
    std::size_t second = 0;
    std::vector<long long> growth;
};

struct RunStep {
    Configuration config;
    std::optional<std::size_t> transition; // transition applied from config
};

struct RunTrace {
    std::vector<RunStep> steps;
    Verdict verdict = Verdict::Reject;
    std::optional<DivergenceCertificate> certificate;
    std::string output; // concatenated transition outputs
};

struct RunOptions {
    bool record_trace = true;
    /// Only consulted for machines without a reversal bound, where the
    /// divergence detector is not complete.
    std::size_t unbounded_step_limit = 10'000'000;
};

RunTrace run_deterministic(const CounterMachine& m, std::string_view word, RunOptions options = {});

/// Deterministic run starting from an arbitrary configuration.
RunTrace run_deterministic_from(
    const CounterMachine& m, const Configuration& start, std::string_view word, RunOptions options = {});

/// Exhaustive search over configurations of a (possibly nondeterministic)
/// machine. Returns true/false when the search is conclusive within
/// max_configurations, nullopt when the reachable space was too large.
std::optional<bool> accepts_by_search(
    const CounterMachine& m, std::string_view word, std::size_t max_configurations = 20000);

// ---------------------------------------------------------------------------
// Normalization

/// Product of the machine with per-counter (direction, reversals) tracking;
/// transitions that would exceed the bound are dropped. The result is
/// budget explicit. Throws InfiniteBudget for unbounded machines.
CounterMachine enforce_reversal_control(const CounterMachine& m);

/// enforce_reversal_control unless m already is budget explicit.
CounterMachine ensure_budget_explicit(const CounterMachine& m);

enum class NormalizeMode : std::uint8_t { StripEot, NoStayIntoFinal, TotalizeDeadState };

CounterMachine normalize(const CounterMachine& m, const std::set<NormalizeMode>& modes);

/// True when no stay-run can loop forever: the graph whose nodes are
/// (state, head symbol, guard) and whose edges are stay transitions that
/// keep the guard unchanged and never decrement has no cycle. Every
/// infinite stay-run of a reversal-bounded machine eventually follows such
/// a cycle.
bool stay_acyclic_check(const CounterMachine& m);

/// Copy of m over a larger alphabet (new letters have no transitions).
CounterMachine with_alphabet(const CounterMachine& m, std::string_view alphabet);

/// Sorted union of two alphabets.
std::string alphabet_union(std::string_view a, std::string_view b);

/// Machine with a single non-final state and no transitions.
CounterMachine empty_machine(std::string_view alphabet, int counters = 0, bool marked = true);

/// Removes states unreachable from the initial state (structurally).
CounterMachine trim_unreachable(const CounterMachine& m);

std::string guard_to_string(Guard g, int counters);
std::string delta_to_string(int delta);

} // namespace rbcm
