#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rbcm/corpus.hpp"
#include "rbcm/decide.hpp"
#include "rbcm/machine.hpp"
#include "testkit.hpp"

namespace acceptance {

struct Outcome {
    bool pass = false;
    std::string detail;
};

/// Memoized membership through the independent oracle.
class OracleLang {
public:
    explicit OracleLang(rbcm::CounterMachine m) : m_(std::move(m)) {}
    bool operator()(const std::string& w)
    {
        auto it = cache_.find(w);
        if (it != cache_.end()) {
            return it->second;
        }
        bool r = testkit::oracle_accepts(m_, w);
        cache_.emplace(w, r);
        return r;
    }
    const rbcm::CounterMachine& machine() const { return m_; }

private:
    rbcm::CounterMachine m_;
    std::unordered_map<std::string, bool> cache_;
};

/// Corpus acceptors (transducer files excluded).
inline std::vector<rbcm::CounterMachine> corpus_machines()
{
    std::vector<rbcm::CounterMachine> out;
    for (const auto& n : rbcm::corpus_names()) {
        auto e = rbcm::load_corpus(n);
        if (!e.file.transducer) {
            out.push_back(e.file.machine);
        }
    }
    return out;
}

inline double elapsed(std::chrono::steady_clock::time_point since)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

Outcome criterion1();
Outcome criterion2();
Outcome criterion3();
Outcome criterion4();
Outcome criterion5();
Outcome criterion6();
Outcome criterion7();
Outcome criterion8();
Outcome criterion9();
Outcome criterion10();

} // namespace acceptance
