#pragma once

// Small helpers shared by the product-style constructions.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rbcm/machine.hpp"

namespace rbcm::detail {

inline std::vector<Symbol> letters_of(const CounterMachine& m)
{
    std::vector<Symbol> out;
    for (char c : m.alphabet) {
        out.push_back(static_cast<unsigned char>(c));
    }
    return out;
}

inline std::vector<Symbol> symbols_of(const CounterMachine& m)
{
    auto out = letters_of(m);
    out.push_back(kEot);
    return out;
}

inline std::vector<std::vector<std::size_t>> outgoing_of(const CounterMachine& m)
{
    std::vector<std::vector<std::size_t>> out(m.num_states());
    for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        out[m.transitions[i].from].push_back(i);
    }
    return out;
}

inline std::vector<int> concat_deltas(const std::vector<int>& a, const std::vector<int>& b)
{
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline Guard join_guards(Guard low, Guard high, int low_counters)
{
    return Guard{low.positive | (high.positive << low_counters)};
}

/// Brings two machines to a common reversal bound: the one with the smaller
/// bound gets its budget enforced in the control.
inline std::pair<CounterMachine, CounterMachine> align_budgets(const CounterMachine& a, const CounterMachine& b, int& bound)
{
    if (a.reversal_bound == b.reversal_bound) {
        bound = a.reversal_bound;
        return {a, b};
    }
    if (a.reversal_bound == kUnbounded || (b.reversal_bound != kUnbounded && b.reversal_bound < a.reversal_bound)) {
        bound = a.reversal_bound;
        return {a, ensure_budget_explicit(b)};
    }
    bound = b.reversal_bound;
    return {ensure_budget_explicit(a), b};
}

/// Interning helper for product constructions.
template <typename Key>
class StateTable {
public:
    explicit StateTable(CounterMachine& out) : out_(out) {}

    /// Returns (id, newly created).
    std::pair<StateId, bool> intern(const Key& key, const std::string& name, bool is_final)
    {
        auto it = ids_.find(key);
        if (it != ids_.end()) {
            return {it->second, false};
        }
        StateId id = out_.add_state(name, is_final);
        ids_.emplace(key, id);
        keys_.push_back(key);
        return {id, true};
    }
    const Key& key(StateId id) const { return keys_[id]; }
    std::size_t size() const { return keys_.size(); }

private:
    CounterMachine& out_;
    std::map<Key, StateId> ids_;
    std::vector<Key> keys_;
};

} // namespace rbcm::detail
