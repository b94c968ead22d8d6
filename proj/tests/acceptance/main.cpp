// Acceptance criteria: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <iostream>
#include <set>

#include "common.hpp"
#include "rbcm/errors.hpp"

int main(int argc, char** argv)
{
    using namespace acceptance;
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"construction oracle suite", criterion1},
        {"end-marker elimination round trip", criterion2},
        {"budget contracts", criterion3},
        {"emptiness vs enumeration", criterion4},
        {"Parikh image of M_ab", criterion5},
        {"characterization from {lambda}", criterion6},
        {"shuffle transducer preimage table", criterion7},
        {"divergence detector", criterion8},
        {"prefix-freeness consistency", criterion9},
        {"CLI round trip and exit codes", criterion10},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::stoi(argv[i]));
    }
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(number)) {
            continue;
        }
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << number << "] " << criteria[i].first << ": " << o.detail
                  << " (" << elapsed(start) << " s)" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
