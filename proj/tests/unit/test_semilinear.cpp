#include <doctest.h>

#include <functional>
#include <random>
#include <set>

#include "rbcm/semilinear.hpp"

using namespace rbcm;

namespace {

// Brute-force membership: multipliers up to `cap` each.
bool brute_member(const LinearSet& s, const Vec& p, long long cap = 12)
{
    std::vector<long long> n(s.periods.size(), 0);
    while (true) {
        Vec x = s.base;
        for (std::size_t j = 0; j < n.size(); ++j) {
            for (std::size_t d = 0; d < x.size(); ++d) {
                x[d] += n[j] * s.periods[j][d];
            }
        }
        if (x == p) {
            return true;
        }
        std::size_t j = 0;
        while (j < n.size() && n[j] == cap) {
            n[j++] = 0;
        }
        if (j == n.size()) {
            return false;
        }
        ++n[j];
    }
}

bool satisfies(const Vec& x, const std::vector<LinearConstraint>& cs)
{
    for (const auto& c : cs) {
        long long v = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            v += c.coeffs[i] * x[i];
        }
        bool ok = c.relation == Relation::Eq ? v == c.rhs : c.relation == Relation::Ge ? v >= c.rhs : v <= c.rhs;
        if (!ok) {
            return false;
        }
    }
    return true;
}

LinearSet random_linear(std::mt19937& rng, std::size_t dim)
{
    LinearSet s;
    for (std::size_t d = 0; d < dim; ++d) {
        s.base.push_back(rng() % 3);
    }
    const std::size_t k = rng() % 3;
    for (std::size_t j = 0; j < k; ++j) {
        Vec p;
        for (std::size_t d = 0; d < dim; ++d) {
            p.push_back(rng() % 3);
        }
        s.periods.push_back(p);
    }
    return s;
}

} // namespace

TEST_CASE("linear_feasible examples")
{
    LinearSet diag{{0, 0}, {{1, 1}}};
    auto r = linear_feasible(diag, {{{1, -1}, Relation::Eq, 0}, {{1, 0}, Relation::Ge, 1}});
    REQUIRE(r);
    CHECK(*r == std::vector<long long>{1});

    LinearSet point{{1, 0}, {}};
    CHECK_FALSE(linear_feasible(point, {{{1, -1}, Relation::Eq, 0}}));

    // (2,0)+n(3,0)+m(0,2): x1 = x2 needs 2+3n = 2m.
    LinearSet mixed{{2, 0}, {{3, 0}, {0, 2}}};
    auto w = linear_feasible(mixed, {{{1, -1}, Relation::Eq, 0}});
    REQUIRE(w);
    CHECK(2 + 3 * (*w)[0] == 2 * (*w)[1]);

    CHECK_THROWS(linear_feasible(point, {{{1, 0, 0}, Relation::Eq, 0}}));
}

TEST_CASE("linear_feasible agrees with brute force")
{
    std::mt19937 rng(21);
    for (int i = 0; i < 150; ++i) {
        LinearSet s = random_linear(rng, 2);
        std::vector<LinearConstraint> cs;
        const int count = 1 + rng() % 2;
        for (int k = 0; k < count; ++k) {
            LinearConstraint c;
            c.coeffs = {static_cast<long long>(rng() % 5) - 2, static_cast<long long>(rng() % 5) - 2};
            c.relation = static_cast<Relation>(rng() % 3);
            c.rhs = static_cast<long long>(rng() % 5) - 1;
            cs.push_back(c);
        }
        bool brute = false;
        std::vector<long long> n(s.periods.size(), 0);
        // Multipliers up to 10 suffice for these coefficient sizes.
        std::function<void(std::size_t)> rec = [&](std::size_t j) {
            if (brute) {
                return;
            }
            if (j == n.size()) {
                Vec x = s.base;
                for (std::size_t q = 0; q < n.size(); ++q) {
                    for (std::size_t d = 0; d < 2; ++d) {
                        x[d] += n[q] * s.periods[q][d];
                    }
                }
                brute = satisfies(x, cs);
                return;
            }
            for (n[j] = 0; n[j] <= 10; ++n[j]) {
                rec(j + 1);
            }
        };
        rec(0);
        auto got = linear_feasible(s, cs);
        CHECK(got.has_value() == brute);
        if (got) {
            Vec x = s.base;
            for (std::size_t q = 0; q < got->size(); ++q) {
                for (std::size_t d = 0; d < 2; ++d) {
                    x[d] += (*got)[q] * s.periods[q][d];
                }
            }
            CHECK(satisfies(x, cs));
        }
    }
}

TEST_CASE("set operations")
{
    SemilinearSet e = SemilinearSet::point({1, 0});
    SemilinearSet f = SemilinearSet::point({0, 1});
    SemilinearSet u = set_union(e, f);
    CHECK(semilinear_member(u, {1, 0}));
    CHECK(semilinear_member(u, {0, 1}));
    CHECK_FALSE(semilinear_member(u, {1, 1}));

    SemilinearSet s = set_sum(e, f);
    CHECK(semilinear_member(s, {1, 1}));
    CHECK_FALSE(semilinear_member(s, {1, 0}));

    SemilinearSet st = set_star(e);
    REQUIRE(st.components.size() >= 1);
    for (long long n = 0; n <= 6; ++n) {
        CHECK(semilinear_member(st, {n, 0}));
        CHECK_FALSE(semilinear_member(st, {n, 1}));
    }

    // (e ∪ f)* is all of N^2.
    SemilinearSet all = set_star(u);
    for (long long x = 0; x <= 4; ++x) {
        for (long long y = 0; y <= 4; ++y) {
            CHECK(semilinear_member(all, {x, y}));
        }
    }
    CHECK(set_star(SemilinearSet::empty(2)) == SemilinearSet::zero(2));
    CHECK(set_sum(e, SemilinearSet::empty(2)).is_empty());
}

TEST_CASE("set_star matches iterated sums")
{
    std::mt19937 rng(22);
    for (int i = 0; i < 30; ++i) {
        SemilinearSet a{2, {random_linear(rng, 2), random_linear(rng, 2)}};
        SemilinearSet st = set_star(a);
        // Points of a^0..a^3 with small multipliers must be members.
        std::set<Vec> reach{{0, 0}};
        std::set<Vec> frontier = reach;
        for (int round = 0; round < 3; ++round) {
            std::set<Vec> next;
            for (const auto& p : frontier) {
                for (long long x = 0; x <= 6; ++x) {
                    for (long long y = 0; y <= 6; ++y) {
                        if (semilinear_member(a, {x, y})) {
                            next.insert({p[0] + x, p[1] + y});
                        }
                    }
                }
            }
            reach.insert(next.begin(), next.end());
            frontier = next;
        }
        for (const auto& p : reach) {
            CHECK(semilinear_member(st, p));
        }
    }
}

TEST_CASE("linear_member agrees with brute force")
{
    std::mt19937 rng(23);
    for (int i = 0; i < 80; ++i) {
        LinearSet s = random_linear(rng, 2);
        for (long long x = 0; x <= 6; ++x) {
            for (long long y = 0; y <= 6; ++y) {
                CHECK(linear_member(s, {x, y}) == brute_member(s, {x, y}));
            }
        }
    }
}

TEST_CASE("minimal_solutions")
{
    // x - y = 0
    auto sols = minimal_solutions({{1, -1}}, 2);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0] == Vec{1, 1});
    // 2x - 3y = 0 has the single minimal solution (3,2).
    auto two = minimal_solutions({{2, -3}}, 2);
    REQUIRE(two.size() == 1);
    CHECK(two[0] == Vec{3, 2});
    // x + y - z = 0: (1,0,1) and (0,1,1).
    auto three = minimal_solutions({{1, 1, -1}}, 3);
    CHECK(std::set<Vec>(three.begin(), three.end()) == std::set<Vec>{{1, 0, 1}, {0, 1, 1}});
}

TEST_CASE("constrained_image agrees with brute force")
{
    std::mt19937 rng(24);
    for (int i = 0; i < 60; ++i) {
        LinearSet s = random_linear(rng, 2);
        std::vector<LinearConstraint> cs{{{1, -1}, static_cast<Relation>(rng() % 3), 0}};
        SemilinearSet img = constrained_image(s, cs);
        for (long long x = 0; x <= 6; ++x) {
            for (long long y = 0; y <= 6; ++y) {
                bool want = brute_member(s, {x, y}) && satisfies({x, y}, cs);
                CHECK(semilinear_member(img, {x, y}) == want);
            }
        }
    }
}

TEST_CASE("project and formatting")
{
    SemilinearSet s{3, {LinearSet{{1, 2, 3}, {{1, 0, 1}}}}};
    SemilinearSet p = project(s, {0, 2});
    CHECK(p.dimension == 2);
    CHECK(semilinear_member(p, {2, 4}));
    CHECK_FALSE(semilinear_member(p, {2, 3}));
    CHECK(format_linear_set(LinearSet{{1, 2}, {{1, 0}, {0, 1}}}) == "linear base=(1,2) periods=[(1,0),(0,1)]");
}
