#pragma once

// Closure constructions on counter machines. Every function returns a new
// machine; inputs are never modified.

#include <string_view>

#include "rbcm/machine.hpp"
#include "rbcm/regular.hpp"

namespace rbcm {

/// Product with a DFA that advances on right moves only.
CounterMachine intersect_regular(const CounterMachine& m, const Dfa& d);

enum class BooleanOp : std::uint8_t { Not, And, Or };

/// `not` needs a deterministic machine whose enforced form is stay-acyclic.
/// `and` also accepts nondeterministic machines (the result is then
/// nondeterministic). `or` needs two complementable machines.
CounterMachine boolean_dcm(const CounterMachine& m1, const CounterMachine* m2, BooleanOp op);

CounterMachine complement_dcm(const CounterMachine& m);
CounterMachine intersect_machines(const CounterMachine& m1, const CounterMachine& m2);
CounterMachine union_dcm(const CounterMachine& m1, const CounterMachine& m2);

/// State (q, d, j) of the end-marker-free one-counter machine.
struct StripLabel {
    StateId base = 0;
    long long d = 0;
    long long j = 0;
};

struct StripResult {
    CounterMachine machine;
    CounterMachine source;            // the budget-explicit input the labels refer to
    std::vector<StripLabel> labels;  // one per output state
    long long tail = 1;               // t
    long long loop = 1;               // lambda
    /// delta_D of the aligned unary DFA: position reached from 0 after n steps.
    long long position(long long n) const { return n < tail ? n : tail + (n - tail) % loop; }
};

StripResult strip_end_marker_one_counter_detailed(const CounterMachine& m);
CounterMachine strip_end_marker_one_counter(const CounterMachine& m);

/// Drops every transition leaving a final state. Throws NotPrefixFree when
/// L(m) is not prefix-free.
CounterMachine make_non_exiting(const CounterMachine& m);

bool is_non_exiting(const CounterMachine& m);

CounterMachine concat_pf_dcmne_dcm(const CounterMachine& m1, const CounterMachine& m2);

namespace detail {
/// The wiring of concat_pf_dcmne_dcm without the non-exiting check. Only
/// meant for tests showing what goes wrong without it.
CounterMachine concat_pf_dcmne_dcm_unchecked(const CounterMachine& m1, const CounterMachine& m2);
} // namespace detail

CounterMachine concat_dcmne_regular(const CounterMachine& m1, const Dfa& d);

/// The machine concat_dcmne_regular works on after enforcement and
/// normalization; its state count is the |Q1| of the size bound.
CounterMachine prepare_for_regular_concat(const CounterMachine& m1);

CounterMachine concat_dcm1_regular(const CounterMachine& m, const Dfa& d);

CounterMachine concat_pf_regular_dcm(const Dfa& d, const CounterMachine& m);

CounterMachine left_quotient_word(const CounterMachine& m, std::string_view w);

CounterMachine concat_ncm(const CounterMachine& m1, const CounterMachine& m2);

enum class InsertionOp : std::uint8_t { Prefix, Suffix, Infix, Outfix, Embed };

CounterMachine inverse_insertion_ncm(const CounterMachine& m, InsertionOp op, int gaps = 1);

} // namespace rbcm
