#pragma once

// Linear and semilinear subsets of N^d, plus the integer feasibility and
// minimal-solution machinery the decision procedures are built on.

#include <optional>
#include <string>
#include <vector>

namespace rbcm {

using Vec = std::vector<long long>;

/// { base + sum_j n_j * periods[j] : n_j >= 0 }
struct LinearSet {
    Vec base;
    std::vector<Vec> periods;

    std::size_t dimension() const noexcept { return base.size(); }
    /// Sorts and deduplicates periods and drops zero periods.
    void canonicalize();
    auto operator<=>(const LinearSet&) const = default;
};

struct SemilinearSet {
    std::size_t dimension = 0;
    std::vector<LinearSet> components;

    static SemilinearSet empty(std::size_t dim) { return SemilinearSet{dim, {}}; }
    static SemilinearSet point(Vec v);
    static SemilinearSet zero(std::size_t dim) { return point(Vec(dim, 0)); }

    bool is_empty() const noexcept { return components.empty(); }
    /// Canonical component order with duplicates and cheaply detectable
    /// subsumed components removed.
    void simplify();
    bool operator==(const SemilinearSet&) const = default;
};

SemilinearSet set_union(const SemilinearSet& a, const SemilinearSet& b);
/// Minkowski sum: Parikh image of concatenation.
SemilinearSet set_sum(const SemilinearSet& a, const SemilinearSet& b);
/// Parikh image of Kleene star.
SemilinearSet set_star(const SemilinearSet& a);

/// `linear base=(1,2) periods=[(1,0),(0,1)]`
std::string format_linear_set(const LinearSet& s);
std::string format_semilinear_set(const SemilinearSet& s);

enum class Relation { Eq, Ge, Le };

/// coeffs . x  (rel)  rhs
struct LinearConstraint {
    Vec coeffs;
    Relation relation = Relation::Eq;
    long long rhs = 0;
};

/// Finds non-negative integer multipliers n with
/// x = base + sum_j n_j * periods[j] satisfying every constraint.
///
/// Exact: each constraint is turned into an equality (with a slack column
/// for inequalities), giving A n = b over integers. By the Steinitz lemma
/// the columns of any solution can be ordered so that every partial sum
/// stays within infinity-distance 2*m*D of the segment [0, b], where m is
/// the number of rows and D bounds the column entries. Breadth-first search
/// over the integer points of that tube therefore finds a solution iff one
/// exists.
std::optional<std::vector<long long>> linear_feasible(
    const LinearSet& set, const std::vector<LinearConstraint>& constraints);

bool linear_member(const LinearSet& set, const Vec& point);
bool semilinear_member(const SemilinearSet& set, const Vec& point);

/// Minimal non-negative solutions of A x = 0 (Contejean-Devie completion).
/// When max_last is set, candidates whose last coordinate exceeds it are
/// pruned.
std::vector<Vec> minimal_solutions(const std::vector<Vec>& rows, std::size_t variables,
                                   std::optional<long long> max_last = std::nullopt);

/// The set { base + sum n_j periods[j] satisfying constraints }, rewritten
/// as a semilinear set of the points x themselves.
SemilinearSet constrained_image(const LinearSet& set, const std::vector<LinearConstraint>& constraints);

/// Keeps only the listed coordinates.
SemilinearSet project(const SemilinearSet& s, const std::vector<std::size_t>& keep);

} // namespace rbcm
