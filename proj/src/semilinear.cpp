#include "rbcm/semilinear.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rbcm/errors.hpp"

namespace rbcm {

namespace {

bool is_zero(const Vec& v)
{
    return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

Vec add(const Vec& a, const Vec& b)
{
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = a[i] + b[i];
    }
    return r;
}

Vec sub(const Vec& a, const Vec& b)
{
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = a[i] - b[i];
    }
    return r;
}

bool non_negative(const Vec& v)
{
    return std::all_of(v.begin(), v.end(), [](long long x) { return x >= 0; });
}

long long dot(const Vec& a, const Vec& b)
{
    long long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

bool contains(const std::vector<Vec>& sorted, const Vec& v)
{
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

/// Cheap sufficient test for v in N-span(periods) (periods sorted).
bool cheap_span(const std::vector<Vec>& periods, const Vec& v)
{
    if (is_zero(v)) {
        return true;
    }
    if (!non_negative(v) && std::all_of(periods.begin(), periods.end(), non_negative)) {
        return false;
    }
    if (contains(periods, v)) {
        return true;
    }
    for (const auto& p : periods) {
        Vec rest = sub(v, p);
        if (contains(periods, rest)) {
            return true;
        }
        // v = c * p
        long long c = 0;
        bool multiple = true;
        for (std::size_t i = 0; i < v.size() && multiple; ++i) {
            if (p[i] == 0) {
                multiple = v[i] == 0;
            } else if (v[i] % p[i] != 0) {
                multiple = false;
            } else {
                long long k = v[i] / p[i];
                if (c == 0) {
                    c = k;
                }
                multiple = k == c && k > 0;
            }
        }
        if (multiple && c > 0) {
            return true;
        }
    }
    return false;
}

/// Does b cover a: a subset of b?
bool covers(const LinearSet& b, const LinearSet& a)
{
    if (!std::includes(b.periods.begin(), b.periods.end(), a.periods.begin(), a.periods.end())) {
        // Each period of a must lie in the span of b's periods.
        for (const auto& p : a.periods) {
            if (!cheap_span(b.periods, p)) {
                return false;
            }
        }
    }
    return cheap_span(b.periods, sub(a.base, b.base));
}

} // namespace

void LinearSet::canonicalize()
{
    std::erase_if(periods, is_zero);
    std::sort(periods.begin(), periods.end());
    periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
    // Drop periods that are sums or multiples of other periods.
    for (std::size_t i = 0; i < periods.size();) {
        std::vector<Vec> others;
        for (std::size_t j = 0; j < periods.size(); ++j) {
            if (j != i) {
                others.push_back(periods[j]);
            }
        }
        if (!others.empty() && cheap_span(others, periods[i])) {
            periods.erase(periods.begin() + static_cast<long>(i));
        } else {
            ++i;
        }
    }
}

SemilinearSet SemilinearSet::point(Vec v)
{
    SemilinearSet s;
    s.dimension = v.size();
    s.components.push_back(LinearSet{std::move(v), {}});
    return s;
}

void SemilinearSet::simplify()
{
    for (auto& c : components) {
        c.canonicalize();
    }
    std::sort(components.begin(), components.end());
    components.erase(std::unique(components.begin(), components.end()), components.end());
    std::vector<bool> removed(components.size(), false);
    for (std::size_t i = 0; i < components.size(); ++i) {
        for (std::size_t j = 0; j < components.size(); ++j) {
            if (i != j && !removed[j] && covers(components[j], components[i])) {
                removed[i] = true;
                break;
            }
        }
    }
    std::vector<LinearSet> kept;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (!removed[i]) {
            kept.push_back(std::move(components[i]));
        }
    }
    components = std::move(kept);

    // (a; Q) u (a + p; Q u {p}) = (a; Q u {p})
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < components.size() && !merged; ++i) {
            for (std::size_t j = 0; j < components.size() && !merged; ++j) {
                const LinearSet& a = components[i];
                const LinearSet& b = components[j];
                if (i == j || b.periods.size() != a.periods.size() + 1) {
                    continue;
                }
                Vec p = sub(b.base, a.base);
                if (!contains(b.periods, p)) {
                    continue;
                }
                std::vector<Vec> q = a.periods;
                q.push_back(p);
                std::sort(q.begin(), q.end());
                if (q != b.periods) {
                    continue;
                }
                LinearSet joined{a.base, b.periods};
                components.erase(components.begin() + static_cast<long>(std::max(i, j)));
                components.erase(components.begin() + static_cast<long>(std::min(i, j)));
                components.push_back(std::move(joined));
                merged = true;
            }
        }
    }
    std::sort(components.begin(), components.end());
}

SemilinearSet set_union(const SemilinearSet& a, const SemilinearSet& b)
{
    SemilinearSet r = a;
    r.dimension = std::max(a.dimension, b.dimension);
    r.components.insert(r.components.end(), b.components.begin(), b.components.end());
    r.simplify();
    return r;
}

SemilinearSet set_sum(const SemilinearSet& a, const SemilinearSet& b)
{
    SemilinearSet r = SemilinearSet::empty(a.dimension);
    for (const auto& x : a.components) {
        for (const auto& y : b.components) {
            LinearSet s{add(x.base, y.base), x.periods};
            s.periods.insert(s.periods.end(), y.periods.begin(), y.periods.end());
            r.components.push_back(std::move(s));
        }
    }
    r.simplify();
    return r;
}

SemilinearSet set_star(const SemilinearSet& a)
{
    // Parikh images commute, so (A u B)* = A* + B*, and
    // (b; P)* = {0} u (b; P u {b}).
    SemilinearSet result = SemilinearSet::zero(a.dimension);
    for (const auto& c : a.components) {
        SemilinearSet one = SemilinearSet::zero(a.dimension);
        LinearSet pumped = c;
        pumped.periods.push_back(c.base);
        one.components.push_back(std::move(pumped));
        one.simplify();
        result = set_sum(result, one);
    }
    return result;
}

namespace {

std::string format_vec(const Vec& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) {
            s += ",";
        }
        s += std::to_string(v[i]);
    }
    return s + ")";
}

} // namespace

std::string format_linear_set(const LinearSet& s)
{
    std::string out = "linear base=" + format_vec(s.base) + " periods=[";
    for (std::size_t i = 0; i < s.periods.size(); ++i) {
        if (i) {
            out += ",";
        }
        out += format_vec(s.periods[i]);
    }
    return out + "]";
}

std::string format_semilinear_set(const SemilinearSet& s)
{
    std::string out;
    for (const auto& c : s.components) {
        out += format_linear_set(c) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct VecHash {
    std::size_t operator()(const Vec& v) const noexcept
    {
        std::size_t h = 1469598103934665603ULL;
        for (long long x : v) {
            h = (h ^ static_cast<std::size_t>(x + 0x9e3779b9)) * 1099511628211ULL;
        }
        return h;
    }
};

/// Equality system A n = b in column form.
struct ColumnSystem {
    std::vector<Vec> columns;          // each of length rows
    std::vector<std::size_t> origin;   // period index, or npos for slack
    Vec target;
};

ColumnSystem build_system(const LinearSet& set, const std::vector<LinearConstraint>& constraints)
{
    const std::size_t m = constraints.size();
    ColumnSystem sys;
    sys.target.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (constraints[r].coeffs.size() != set.dimension()) {
            throw PreconditionViolated("constraint dimension does not match the linear set");
        }
        sys.target[r] = constraints[r].rhs - dot(constraints[r].coeffs, set.base);
    }
    for (std::size_t j = 0; j < set.periods.size(); ++j) {
        if (set.periods[j].size() != set.dimension()) {
            throw PreconditionViolated("period dimension does not match the base");
        }
        Vec col(m);
        for (std::size_t r = 0; r < m; ++r) {
            col[r] = dot(constraints[r].coeffs, set.periods[j]);
        }
        sys.columns.push_back(std::move(col));
        sys.origin.push_back(j);
    }
    for (std::size_t r = 0; r < m; ++r) {
        if (constraints[r].relation == Relation::Eq) {
            continue;
        }
        Vec col(m, 0);
        col[r] = constraints[r].relation == Relation::Ge ? -1 : 1;
        sys.columns.push_back(std::move(col));
        sys.origin.push_back(static_cast<std::size_t>(-1));
    }
    return sys;
}

/// Point within infinity-distance radius of the segment [0, target]?
bool in_tube(const Vec& y, const Vec& target, long long radius)
{
    // Intersect the intervals of admissible tau in [0, 1], as fractions.
    __int128 lo_num = 0, lo_den = 1, hi_num = 1, hi_den = 1;
    for (std::size_t r = 0; r < y.size(); ++r) {
        long long b = target[r];
        if (b == 0) {
            if (y[r] > radius || y[r] < -radius) {
                return false;
            }
            continue;
        }
        __int128 den = b > 0 ? b : -b;
        __int128 a_num = b > 0 ? (y[r] - radius) : -(y[r] + radius);
        __int128 b_num = b > 0 ? (y[r] + radius) : -(y[r] - radius);
        if (a_num * lo_den > lo_num * den) {
            lo_num = a_num;
            lo_den = den;
        }
        if (b_num * hi_den < hi_num * den) {
            hi_num = b_num;
            hi_den = den;
        }
        if (lo_num * hi_den > hi_num * lo_den) {
            return false;
        }
    }
    return lo_num * hi_den <= hi_num * lo_den;
}

} // namespace

std::optional<std::vector<long long>> linear_feasible(
    const LinearSet& set, const std::vector<LinearConstraint>& constraints)
{
    std::vector<long long> multipliers(set.periods.size(), 0);
    ColumnSystem sys = build_system(set, constraints);
    const std::size_t m = constraints.size();
    if (is_zero(sys.target)) {
        return multipliers;
    }

    // Distinct non-zero columns only.
    std::vector<std::size_t> useful;
    {
        std::set<Vec> seen;
        for (std::size_t j = 0; j < sys.columns.size(); ++j) {
            if (!is_zero(sys.columns[j]) && seen.insert(sys.columns[j]).second) {
                useful.push_back(j);
            }
        }
    }
    long long delta = 1;
    for (std::size_t j : useful) {
        for (long long x : sys.columns[j]) {
            delta = std::max(delta, x < 0 ? -x : x);
        }
    }
    const long long radius = 2 * static_cast<long long>(m) * delta;

    struct Parent {
        Vec from;
        std::size_t column;
    };
    std::unordered_map<Vec, Parent, VecHash> parent;
    std::deque<Vec> queue;
    Vec origin(m, 0);
    parent.emplace(origin, Parent{{}, static_cast<std::size_t>(-1)});
    queue.push_back(origin);
    while (!queue.empty()) {
        Vec cur = std::move(queue.front());
        queue.pop_front();
        for (std::size_t j : useful) {
            Vec next = add(cur, sys.columns[j]);
            if (parent.count(next) || !in_tube(next, sys.target, radius)) {
                continue;
            }
            parent.emplace(next, Parent{cur, j});
            if (next == sys.target) {
                Vec walk = next;
                while (walk != origin) {
                    const Parent& p = parent.at(walk);
                    if (sys.origin[p.column] != static_cast<std::size_t>(-1)) {
                        ++multipliers[sys.origin[p.column]];
                    }
                    walk = p.from;
                }
                return multipliers;
            }
            queue.push_back(std::move(next));
        }
    }
    return std::nullopt;
}

bool linear_member(const LinearSet& set, const Vec& point)
{
    std::vector<LinearConstraint> cs;
    for (std::size_t d = 0; d < set.dimension(); ++d) {
        LinearConstraint c;
        c.coeffs.assign(set.dimension(), 0);
        c.coeffs[d] = 1;
        c.rhs = point.at(d);
        cs.push_back(std::move(c));
    }
    return linear_feasible(set, cs).has_value();
}

bool semilinear_member(const SemilinearSet& set, const Vec& point)
{
    return std::any_of(set.components.begin(), set.components.end(),
                       [&](const LinearSet& c) { return linear_member(c, point); });
}

std::vector<Vec> minimal_solutions(const std::vector<Vec>& rows, std::size_t variables, std::optional<long long> max_last)
{
    const std::size_t m = rows.size();
    std::vector<Vec> columns(variables, Vec(m));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < variables; ++j) {
            columns[j][r] = rows[r][j];
        }
    }
    struct Candidate {
        Vec x;
        Vec image; // A x
    };
    std::vector<Vec> basis;
    auto dominated = [&](const Vec& y) {
        for (const auto& b : basis) {
            bool le = true;
            for (std::size_t j = 0; j < variables && le; ++j) {
                le = b[j] <= y[j];
            }
            if (le) {
                return true;
            }
        }
        return false;
    };

    std::vector<Candidate> frontier;
    for (std::size_t j = 0; j < variables; ++j) {
        Vec x(variables, 0);
        x[j] = 1;
        if (max_last && j + 1 == variables && *max_last < 1) {
            continue;
        }
        frontier.push_back({std::move(x), columns[j]});
    }
    while (!frontier.empty()) {
        std::vector<Candidate> open;
        for (auto& c : frontier) {
            if (is_zero(c.image)) {
                basis.push_back(c.x);
            } else {
                open.push_back(std::move(c));
            }
        }
        std::set<Vec> seen;
        std::vector<Candidate> next;
        for (const auto& c : open) {
            for (std::size_t j = 0; j < variables; ++j) {
                if (dot(c.image, columns[j]) >= 0) {
                    continue;
                }
                Vec y = c.x;
                ++y[j];
                if (max_last && y.back() > *max_last) {
                    continue;
                }
                if (dominated(y) || !seen.insert(y).second) {
                    continue;
                }
                next.push_back({std::move(y), add(c.image, columns[j])});
            }
        }
        frontier = std::move(next);
    }
    return basis;
}

SemilinearSet constrained_image(const LinearSet& set, const std::vector<LinearConstraint>& constraints)
{
    SemilinearSet out = SemilinearSet::empty(set.dimension());
    if (constraints.empty()) {
        out.components.push_back(set);
        out.simplify();
        return out;
    }
    ColumnSystem sys = build_system(set, constraints);
    const std::size_t m = constraints.size();
    const std::size_t vars = sys.columns.size() + 1; // + homogenizing variable
    std::vector<Vec> rows(m, Vec(vars, 0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < sys.columns.size(); ++j) {
            rows[r][j] = sys.columns[j][r];
        }
        rows[r][vars - 1] = -sys.target[r];
    }
    auto sols = minimal_solutions(rows, vars, 1);
    auto image = [&](const Vec& sol) {
        Vec x(set.dimension(), 0);
        for (std::size_t j = 0; j < sys.columns.size(); ++j) {
            std::size_t p = sys.origin[j];
            if (p == static_cast<std::size_t>(-1) || sol[j] == 0) {
                continue;
            }
            for (std::size_t d = 0; d < x.size(); ++d) {
                x[d] += sol[j] * set.periods[p][d];
            }
        }
        return x;
    };
    std::vector<Vec> periods;
    for (const auto& s : sols) {
        if (s.back() == 0) {
            periods.push_back(image(s));
        }
    }
    for (const auto& s : sols) {
        if (s.back() == 1) {
            out.components.push_back(LinearSet{add(set.base, image(s)), periods});
        }
    }
    out.simplify();
    return out;
}

SemilinearSet project(const SemilinearSet& s, const std::vector<std::size_t>& keep)
{
    auto proj = [&](const Vec& v) {
        Vec r;
        r.reserve(keep.size());
        for (std::size_t k : keep) {
            r.push_back(v[k]);
        }
        return r;
    };
    SemilinearSet out = SemilinearSet::empty(keep.size());
    for (const auto& c : s.components) {
        LinearSet l{proj(c.base), {}};
        for (const auto& p : c.periods) {
            l.periods.push_back(proj(p));
        }
        out.components.push_back(std::move(l));
    }
    out.simplify();
    return out;
}

} // namespace rbcm
