#pragma once

// Line-oriented text format for machines and transducers.
//
//   machine M_ab
//   kind dcm                       (dcm | ncm | transducer)
//   acceptance marked              (marked | unmarked)
//   counters 1
//   reversals 1                    (a number or inf)
//   alphabet a b
//   outalphabet a b                (transducers only)
//   states s0 s1 f
//   initial s0
//   final f
//   trans s0 a * -> s0 R +1
//   trans s0 $ z -> f S 0 output ""
//
// `$` is the end marker. Guards have one character per counter: z (zero),
// p (positive) or * (both); a machine without counters writes `-`. Lines
// whose first non-blank character is `#` are comments.

#include <string>
#include <string_view>

#include "rbcm/machine.hpp"
#include "rbcm/transduce.hpp"

namespace rbcm {

struct MachineFile {
    CounterMachine machine;
    bool transducer = false;
    std::string output_alphabet;

    CounterTransducer as_transducer() const { return CounterTransducer{machine, output_alphabet}; }
};

MachineFile parse_machine_file(std::string_view text);

/// Parses a machine; transducer files are accepted and their outputs kept.
CounterMachine parse_machine(std::string_view text);

/// Throws ParseError unless the file declares `kind transducer`.
CounterTransducer parse_transducer(std::string_view text);

std::string serialize_machine(const CounterMachine& m);
std::string serialize_transducer(const CounterTransducer& a);

} // namespace rbcm
