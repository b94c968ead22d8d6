#pragma once

// Counter transducers: counter machines whose transitions emit output words.
// A transducer accepts w with output x when its run reaches a final state
// with w consumed, x being everything emitted up to that point.

#include <optional>
#include <string>
#include <string_view>

#include "rbcm/machine.hpp"

namespace rbcm {

struct CounterTransducer {
    CounterMachine machine;      // input alphabet and control; outputs on transitions
    std::string output_alphabet; // Gamma

    /// One more than the longest output word.
    std::size_t buffer_bound() const;
    bool operator==(const CounterTransducer&) const = default;
};

ValidationReport validate_transducer(const CounterTransducer& a);

/// Output of the deterministic run on w, or nullopt when it rejects or
/// diverges.
std::optional<std::string> transduce_det(const CounterTransducer& a, std::string_view w);

/// Machine for { w : A(w) in L(m) }. Buffered output is fed to m between
/// transducer steps; on the transducer's accepting end-marker configuration
/// the buffer is sealed and m finishes its own end-marker run.
CounterMachine inverse_apply(const CounterTransducer& a, const CounterMachine& m);

/// Nondeterministic machine over Gamma for A(L(m)).
CounterMachine forward_image_ncm(const CounterTransducer& a, const CounterMachine& m);

/// Same control as m with every output empty; end-marker transitions out
/// of final states are dropped first.
CounterTransducer to_null_transducer(const CounterMachine& m);

/// Accepts exactly the empty word over the given alphabet.
CounterMachine lambda_acceptor(std::string_view alphabet = "");

} // namespace rbcm
