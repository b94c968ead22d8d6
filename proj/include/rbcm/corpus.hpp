#pragma once

// Built-in machines and transducers, shipped as machine files under corpus/
// and compiled into the library.

#include <string>
#include <vector>

#include "rbcm/format.hpp"

namespace rbcm {

struct ExpectedRow {
    std::string word;
    bool accept = false;
    std::string tag; // e.g. DERIVED, TRIVIAL
};

struct CorpusEntry {
    std::string name;
    std::string description;
    std::string text; // the file as shipped
    MachineFile file;
    std::vector<ExpectedRow> expected;
};

std::vector<std::string> corpus_names();

/// Throws UnknownEntry for names outside corpus_names().
CorpusEntry load_corpus(const std::string& name);

} // namespace rbcm
