// Times enumerate_words against its serial reference on a few machines.

#include <chrono>
#include <iostream>

#include <omp.h>

#include "rbcm/corpus.hpp"
#include "rbcm/decide.hpp"

namespace {

template <class F>
double seconds(F&& f)
{
    auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv)
{
    std::size_t max_len = argc > 1 ? std::stoul(argv[1]) : 10;
    std::cout << "threads " << omp_get_max_threads() << ", max length " << max_len << "\n";
    for (const char* name : {"M_ab", "M_neq", "T_shuffle"}) {
        const auto m = rbcm::load_corpus(name).file.machine;
        std::size_t n_serial = 0;
        std::size_t n_parallel = 0;
        double ts = seconds([&] { n_serial = rbcm::enumerate_words_serial(m, max_len).size(); });
        double tp = seconds([&] { n_parallel = rbcm::enumerate_words(m, max_len).size(); });
        std::cout << name << ": serial " << ts << " s, parallel " << tp << " s, words " << n_serial;
        if (n_serial != n_parallel) {
            std::cout << " (MISMATCH: " << n_parallel << ")";
        }
        std::cout << "\n";
    }
}
