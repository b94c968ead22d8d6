#pragma once

#include <string>

#include "rbcm/corpus.hpp"
#include "testkit.hpp"

inline rbcm::CounterMachine corpus_machine(const std::string& name)
{
    return rbcm::load_corpus(name).file.machine;
}

// Machine built from a file body; saves spelling out transitions by hand.
inline rbcm::CounterMachine machine_from(const std::string& text)
{
    return rbcm::parse_machine(text);
}

// Agreement with the raw-configuration oracle on all words up to n.
inline std::string first_oracle_mismatch(const rbcm::CounterMachine& built, const rbcm::CounterMachine& reference,
                                         std::size_t n)
{
    for (const auto& w : testkit::words_upto(reference.alphabet, n)) {
        if (testkit::oracle_accepts(built, w) != testkit::oracle_accepts(reference, w)) {
            return w.empty() ? std::string("<lambda>") : w;
        }
    }
    return "";
}
