#pragma once

// Independent references used by the test suites. Two engines:
//
//  * rat:: — an exact two-phase tableau simplex over boost rationals with
//    Bland's rule. Slow, tiny, and impossible to argue with. Used for
//    statuses, exact zero tests, minimal-face coefficients and as the
//    reference for the floating-point kernel.
//
//  * grid:: — brute-force search over the lambda simplex with local
//    refinement. Used for radial scores and Pareto gaps at desk scale.
//
// Neither engine shares any solver code with the library under test; they
// only reuse the passive Dataset container.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dea/dataset.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;

enum class RatStatus { optimal, infeasible, unbounded };

// Standard-form problem: minimize c.x
// subject to A x (sense) b, x >= 0. sense: -1 <=, 0 ==, +1 >=.
struct RatProblem {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    std::vector<Rational> c;
    std::vector<int> sense;

    std::size_t rows() const { return a.size(); }
    std::size_t cols() const { return c.size(); }
};

struct RatResult {
    RatStatus status = RatStatus::infeasible;
    Rational objective;
    std::vector<Rational> x;
};

namespace detail {

struct Tableau {
    std::vector<std::vector<Rational>> t;  // rows x (cols + 1), last entry rhs
    std::vector<int> basis;
    std::size_t ncols = 0;

    void pivot(std::size_t prow, std::size_t pcol) {
        auto& row = t[prow];
        const Rational piv = row[pcol];
        for (auto& v : row) v /= piv;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == prow) continue;
            const Rational f = t[i][pcol];
            if (f == 0) continue;
            for (std::size_t j = 0; j <= ncols; ++j) t[i][j] -= f * row[j];
        }
        basis[prow] = static_cast<int>(pcol);
    }
};

// Bland's rule simplex over an exact tableau. `allowed[j]` masks columns that
// may enter. Returns false when unbounded.
inline bool run_simplex(Tableau& tab, const std::vector<Rational>& cost,
                        const std::vector<char>& allowed) {
    const std::size_t rows = tab.t.size();
    for (;;) {
        // reduced costs, priced against the current basis
        std::size_t enter = tab.ncols;
        for (std::size_t j = 0; j < tab.ncols; ++j) {
            if (!allowed[j]) continue;
            bool basic = false;
            for (std::size_t i = 0; i < rows; ++i)
                if (tab.basis[i] == static_cast<int>(j)) { basic = true; break; }
            if (basic) continue;
            Rational d = cost[j];
            for (std::size_t i = 0; i < rows; ++i) {
                const Rational cb = cost[static_cast<std::size_t>(tab.basis[i])];
                if (cb != 0) d -= cb * tab.t[i][j];
            }
            if (d < 0) { enter = j; break; }  // Bland: smallest improving index
        }
        if (enter == tab.ncols) return true;  // optimal

        std::size_t leave = rows;
        Rational best_ratio;
        for (std::size_t i = 0; i < rows; ++i) {
            if (tab.t[i][enter] <= 0) continue;
            Rational ratio = tab.t[i][tab.ncols] / tab.t[i][enter];
            if (leave == rows || ratio < best_ratio ||
                (ratio == best_ratio && tab.basis[i] < tab.basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave == rows) return false;  // unbounded
        tab.pivot(leave, enter);
    }
}

}  // namespace detail

inline RatResult solve(const RatProblem& p) {
    using detail::Tableau;
    const std::size_t m = p.rows(), n = p.cols();
    RatResult res;

    // Normalize to A x = b with b >= 0, adding slack/surplus columns.
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n));
    std::vector<Rational> b(m);
    std::vector<int> sense(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = p.a[i];
        b[i] = p.b[i];
        sense[i] = p.sense[i];
        if (b[i] < 0) {
            for (auto& v : a[i]) v = -v;
            b[i] = -b[i];
            sense[i] = -sense[i];
        }
    }
    std::size_t ncols = n;
    std::vector<std::ptrdiff_t> slack_col(m, -1);
    for (std::size_t i = 0; i < m; ++i)
        if (sense[i] != 0) slack_col[i] = static_cast<std::ptrdiff_t>(ncols++);
    std::vector<std::ptrdiff_t> art_col(m, -1);
    std::size_t first_art = ncols;
    for (std::size_t i = 0; i < m; ++i)
        if (sense[i] != -1) art_col[i] = static_cast<std::ptrdiff_t>(ncols++);

    Tableau tab;
    tab.ncols = ncols;
    tab.t.assign(m, std::vector<Rational>(ncols + 1));
    tab.basis.assign(m, -1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = a[i][j];
        if (slack_col[i] >= 0)
            tab.t[i][static_cast<std::size_t>(slack_col[i])] = sense[i] == -1 ? 1 : -1;
        if (art_col[i] >= 0) {
            tab.t[i][static_cast<std::size_t>(art_col[i])] = 1;
            tab.basis[i] = static_cast<int>(art_col[i]);
        } else {
            tab.basis[i] = static_cast<int>(slack_col[i]);
        }
        tab.t[i][ncols] = b[i];
    }

    std::vector<char> allowed(ncols, 1);
    const bool need_phase1 =
        std::any_of(art_col.begin(), art_col.end(), [](std::ptrdiff_t c) { return c >= 0; });
    if (need_phase1) {
        std::vector<Rational> phase1(ncols, Rational(0));
        for (std::size_t j = first_art; j < ncols; ++j) phase1[j] = 1;
        detail::run_simplex(tab, phase1, allowed);
        Rational infeas = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (tab.basis[i] >= static_cast<int>(first_art)) infeas += tab.t[i][ncols];
        if (infeas != 0) {
            res.status = RatStatus::infeasible;
            return res;
        }
        // Pivot residual artificials out of the basis where possible. Rows
        // that stay on an artificial are identically zero and inert.
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis[i] < static_cast<int>(first_art)) continue;
            for (std::size_t j = 0; j < first_art; ++j) {
                if (tab.t[i][j] != 0) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
        for (std::size_t j = first_art; j < ncols; ++j) allowed[j] = 0;
    }

    std::vector<Rational> cost(ncols, Rational(0));
    for (std::size_t j = 0; j < n; ++j) cost[j] = p.c[j];
    if (!detail::run_simplex(tab, cost, allowed)) {
        res.status = RatStatus::unbounded;
        return res;
    }

    res.status = RatStatus::optimal;
    res.x.assign(n, Rational(0));
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] >= 0 && tab.basis[i] < static_cast<int>(n))
            res.x[static_cast<std::size_t>(tab.basis[i])] = tab.t[i][ncols];
    res.objective = 0;
    for (std::size_t j = 0; j < n; ++j) res.objective += p.c[j] * res.x[j];
    return res;
}

// ---------------------------------------------------------------------------
// Exact DEA references built directly on the rational simplex.
// ---------------------------------------------------------------------------

namespace rat {

inline Rational exact(double v) { return Rational(v); }

// Feasibility of: sum x_j l_j <= px, sum y_j l_j >= py, sum l_j = 1, l >= 0,
// optionally excluding one generating unit.
inline bool membership(const dea::Dataset& d, const dea::Point& p, std::ptrdiff_t exclude = -1) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    RatProblem lp;
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j)
        if (static_cast<std::ptrdiff_t>(j) != exclude) cols.push_back(j);
    lp.c.assign(cols.size(), Rational(0));
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Rational> row;
        for (std::size_t j : cols) row.push_back(exact(d.inputs(j, k)));
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.x[k]));
        lp.sense.push_back(-1);
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> row;
        for (std::size_t j : cols) row.push_back(exact(d.outputs(j, i)));
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.y[i]));
        lp.sense.push_back(1);
    }
    lp.a.push_back(std::vector<Rational>(cols.size(), Rational(1)));
    lp.b.push_back(Rational(1));
    lp.sense.push_back(0);
    return solve(lp).status == RatStatus::optimal;
}

// Exact theta* of the input-oriented model (nullopt = target outside PPS).
inline std::optional<Rational> theta(const dea::Dataset& d, const dea::Point& p) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    RatProblem lp;  // vars: lambda (n), theta
    lp.c.assign(n + 1, Rational(0));
    lp.c[n] = 1;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Rational> row(n + 1);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.inputs(j, k));
        row[n] = -exact(p.x[k]);
        lp.a.push_back(std::move(row));
        lp.b.push_back(Rational(0));
        lp.sense.push_back(-1);
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> row(n + 1);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.outputs(j, i));
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.y[i]));
        lp.sense.push_back(1);
    }
    std::vector<Rational> conv(n + 1, Rational(1));
    conv[n] = 0;
    lp.a.push_back(std::move(conv));
    lp.b.push_back(Rational(1));
    lp.sense.push_back(0);
    auto res = solve(lp);
    if (res.status != RatStatus::optimal) return std::nullopt;
    return res.objective;
}

// Exact eta* of the output-oriented model (nullopt = outside PPS).
inline std::optional<Rational> eta(const dea::Dataset& d, const dea::Point& p) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    RatProblem lp;  // vars: lambda (n), eta; maximize eta == minimize -eta
    lp.c.assign(n + 1, Rational(0));
    lp.c[n] = -1;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Rational> row(n + 1);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.inputs(j, k));
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.x[k]));
        lp.sense.push_back(-1);
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> row(n + 1);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.outputs(j, i));
        row[n] = -exact(p.y[i]);
        lp.a.push_back(std::move(row));
        lp.b.push_back(Rational(0));
        lp.sense.push_back(1);
    }
    std::vector<Rational> conv(n + 1, Rational(1));
    conv[n] = 0;
    lp.a.push_back(std::move(conv));
    lp.b.push_back(Rational(1));
    lp.sense.push_back(0);
    auto res = solve(lp);
    if (res.status != RatStatus::optimal) return std::nullopt;
    return -res.objective;
}

// Exact maximal slack sum at a pinned radial score (the second stage).
// orientation_input selects model; score is pinned through an equality of the
// radial variable, which exact arithmetic permits directly.
inline Rational max_slack_sum(const dea::Dataset& d, const dea::Point& p, bool orientation_input,
                              const Rational& score) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    // vars: lambda (n), s- (m), s+ (r)
    RatProblem lp;
    lp.c.assign(n + m + r, Rational(0));
    for (std::size_t k = 0; k < m + r; ++k) lp.c[n + k] = -1;  // maximize slack sum
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Rational> row(n + m + r);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.inputs(j, k));
        row[n + k] = 1;
        lp.a.push_back(std::move(row));
        lp.b.push_back(orientation_input ? score * exact(p.x[k]) : exact(p.x[k]));
        lp.sense.push_back(0);
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> row(n + m + r);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.outputs(j, i));
        row[n + m + i] = -1;
        lp.a.push_back(std::move(row));
        lp.b.push_back(orientation_input ? exact(p.y[i]) : score * exact(p.y[i]));
        lp.sense.push_back(0);
    }
    std::vector<Rational> conv(n + m + r, Rational(0));
    for (std::size_t j = 0; j < n; ++j) conv[j] = 1;
    lp.a.push_back(std::move(conv));
    lp.b.push_back(Rational(1));
    lp.sense.push_back(0);
    auto res = solve(lp);
    if (res.status != RatStatus::optimal) return Rational(-1);  // pinned stage infeasible
    return -res.objective;
}

// Exact weak-Pareto gap: the largest uniform (range-normalized) simultaneous
// improvement step available from p while staying in the PPS.
inline std::optional<Rational> wpe_gap(const dea::Dataset& d, const dea::Point& p) {
    if (!rat::membership(d, p)) return std::nullopt;
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    const auto stats = dea::column_stats(d);
    RatProblem lp;  // vars: lambda (n), delta
    lp.c.assign(n + 1, Rational(0));
    lp.c[n] = -1;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Rational> row(n + 1);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.inputs(j, k));
        row[n] = exact(stats.input_cols[k].range_unit);
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.x[k]));
        lp.sense.push_back(-1);
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> row(n + 1);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.outputs(j, i));
        row[n] = -exact(stats.output_cols[i].range_unit);
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.y[i]));
        lp.sense.push_back(1);
    }
    std::vector<Rational> conv(n + 1, Rational(1));
    conv[n] = 0;
    lp.a.push_back(std::move(conv));
    lp.b.push_back(Rational(1));
    lp.sense.push_back(0);
    auto res = solve(lp);
    if (res.status != RatStatus::optimal) return std::nullopt;
    return -res.objective;
}

// Generators of the representation p = sum l_j (X_j,Y_j) + sum mu_k (e_k,0)
// - sum nu_i (0,e_i): maximal attainable coefficient of one generator.
// generator < n: unit index; n..n+m-1: input ray; n+m..: output ray.
inline std::optional<Rational> max_coefficient(const dea::Dataset& d, const dea::Point& p,
                                               std::size_t generator) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    RatProblem lp;  // vars: lambda (n), mu (m), nu (r)
    lp.c.assign(n + m + r, Rational(0));
    lp.c[generator] = -1;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<Rational> row(n + m + r);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.inputs(j, k));
        row[n + k] = 1;
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.x[k]));
        lp.sense.push_back(0);
    }
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> row(n + m + r);
        for (std::size_t j = 0; j < n; ++j) row[j] = exact(d.outputs(j, i));
        row[n + m + i] = -1;
        lp.a.push_back(std::move(row));
        lp.b.push_back(exact(p.y[i]));
        lp.sense.push_back(0);
    }
    std::vector<Rational> conv(n + m + r, Rational(0));
    for (std::size_t j = 0; j < n; ++j) conv[j] = 1;
    lp.a.push_back(std::move(conv));
    lp.b.push_back(Rational(1));
    lp.sense.push_back(0);
    auto res = solve(lp);
    if (res.status != RatStatus::optimal) return std::nullopt;
    return -res.objective;
}

// Definition-level efficiency: radial score is one and the maximal slack sum
// vanishes, in both orientations.
inline bool is_efficient(const dea::Dataset& d, std::size_t j) {
    const auto p = d.point(j);
    auto th = rat::theta(d, p);
    if (!th || *th != 1) return false;
    if (rat::max_slack_sum(d, p, true, Rational(1)) != 0) return false;
    auto et = rat::eta(d, p);
    if (!et || *et != 1) return false;
    return rat::max_slack_sum(d, p, false, Rational(1)) == 0;
}

inline bool is_extreme_efficient(const dea::Dataset& d, std::size_t j) {
    if (!rat::is_efficient(d, j)) return false;
    return !rat::membership(d, d.point(j), static_cast<std::ptrdiff_t>(j));
}

// Terminal directions per the infinite-edge test: a probe one range-unit out
// along the candidate ray must sit on the boundary and have the ray itself as
// its minimal face. Returns direction codes: 0..m-1 input-increase axes,
// m..m+r-1 output-decrease axes.
inline std::vector<std::size_t> terminal_directions(const dea::Dataset& d, std::size_t j) {
    std::vector<std::size_t> dirs;
    if (!rat::is_extreme_efficient(d, j)) return dirs;
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    const auto stats = dea::column_stats(d);
    for (std::size_t dcode = 0; dcode < m + r; ++dcode) {
        dea::Point probe = d.point(j);
        if (dcode < m)
            probe.x[dcode] += stats.input_cols[dcode].range_unit;
        else
            probe.y[dcode - m] -= stats.output_cols[dcode - m].range_unit;
        auto gap = rat::wpe_gap(d, probe);
        if (!gap || *gap != 0) continue;
        bool edge = true;
        for (std::size_t g = 0; g < n + m + r && edge; ++g) {
            auto coeff = rat::max_coefficient(d, probe, g);
            if (!coeff) { edge = false; break; }
            const bool should_be_positive = (g == j) || (g == n + dcode);
            if (should_be_positive ? (*coeff == 0) : (*coeff > 0)) edge = false;
        }
        if (edge) dirs.push_back(dcode);
    }
    return dirs;
}

}  // namespace rat

// ---------------------------------------------------------------------------
// Simplex-grid search over lambda with local refinement. The DEA objectives
// are convex (or concave) over the simplex, so shrinking the grid around the
// incumbent converges.
// ---------------------------------------------------------------------------

namespace grid {

namespace detail {

inline void compositions_rec(std::size_t pos, std::size_t remaining, std::vector<std::size_t>& parts,
                             std::size_t total, std::vector<std::vector<double>>& out) {
    if (pos + 1 == parts.size()) {
        parts[pos] = remaining;
        std::vector<double> lam(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i)
            lam[i] = static_cast<double>(parts[i]) / static_cast<double>(total);
        out.push_back(std::move(lam));
        return;
    }
    for (std::size_t k = 0; k <= remaining; ++k) {
        parts[pos] = k;
        compositions_rec(pos + 1, remaining - k, parts, total, out);
    }
}

// All lambda vectors with entries on the grid {0, 1/total, ..., 1} summing to 1.
inline void compositions(std::size_t n, std::size_t total,
                         std::vector<std::vector<double>>& out) {
    std::vector<std::size_t> parts(n, 0);
    compositions_rec(0, total, parts, total, out);
}

// Search over the simplex: a full grid scan shrunk around the incumbent
// (the radius contracts only on rounds that fail to improve), interleaved
// with line searches along every pairwise mass exchange e_to - e_from. The
// penalized scores are convex along lines, so ternary search applies; the
// exchanges resolve kinks at feasibility boundaries where blended grid moves
// stall.
template <typename Score>
std::optional<std::pair<double, std::vector<double>>> refine(std::size_t n, Score score,
                                                             std::size_t steps,
                                                             std::size_t rounds) {
    std::vector<std::vector<double>> pts;
    if (n == 1) {
        pts.push_back({1.0});
    } else {
        compositions(n, steps, pts);
    }
    std::optional<std::pair<double, std::vector<double>>> best;
    std::vector<double> center(n, 0.0);
    double radius = 1.0;
    std::vector<double> lam(n);
    const double rel = 1e-13;
    for (std::size_t round = 0; round < rounds; ++round) {
        bool improved = false;
        for (const auto& g : pts) {
            for (std::size_t i = 0; i < n; ++i)
                lam[i] = best ? (1.0 - radius) * center[i] + radius * g[i] : g[i];
            auto v = score(lam);
            if (!v) continue;
            if (!best || *v < best->first - rel * (1.0 + std::abs(best->first))) {
                best = {{*v, lam}};
                improved = true;
            }
        }
        if (!best) return std::nullopt;  // nothing usable on the full grid
        center = best->second;

        for (std::size_t from = 0; from < n; ++from) {
            if (center[from] <= 1e-15) continue;
            for (std::size_t to = 0; to < n; ++to) {
                if (to == from) continue;
                auto at = [&](double t) {
                    std::vector<double> l = center;
                    l[from] -= t;
                    l[to] += t;
                    auto v = score(l);
                    return v ? *v : std::numeric_limits<double>::max();
                };
                double lo = 0.0, hi = center[from];
                for (int it = 0; it < 90; ++it) {
                    const double a = lo + (hi - lo) / 3.0;
                    const double b = hi - (hi - lo) / 3.0;
                    if (at(a) <= at(b))
                        hi = b;
                    else
                        lo = a;
                }
                const double t = 0.5 * (lo + hi);
                const double v = at(t);
                if (v < best->first - rel * (1.0 + std::abs(best->first))) {
                    center[from] -= t;
                    center[to] += t;
                    best = {{v, center}};
                    improved = true;
                }
            }
        }
        if (!improved) radius *= 0.5;
    }
    return best;
}

}  // namespace detail

// theta* by grid search with an exact penalty on the output constraints, so
// optima sitting on the feasibility boundary stay reachable. nullopt when
// even the best mixture is measurably infeasible.
inline std::optional<double> theta(const dea::Dataset& d, const dea::Point& p,
                                   std::size_t steps = 12, std::size_t rounds = 30) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    auto evaluate = [&](const std::vector<double>& lam) {
        double th = 0.0, viol = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            double y = 0.0;
            for (std::size_t j = 0; j < n; ++j) y += d.outputs(j, i) * lam[j];
            viol += std::max(0.0, (p.y[i] - y) / (1.0 + p.y[i]));
        }
        for (std::size_t k = 0; k < m; ++k) {
            double x = 0.0;
            for (std::size_t j = 0; j < n; ++j) x += d.inputs(j, k) * lam[j];
            if (p.x[k] > 0.0)
                th = std::max(th, x / p.x[k]);
            else
                viol += x / (1.0 + p.x[k]);
        }
        return std::make_pair(th, viol);
    };
    auto score = [&](const std::vector<double>& lam) -> std::optional<double> {
        const auto [th, viol] = evaluate(lam);
        return th + 1e4 * viol;
    };
    auto best = detail::refine(n, score, steps, rounds);
    if (!best) return std::nullopt;
    const auto [th, viol] = evaluate(best->second);
    if (viol > 1e-7) return std::nullopt;
    return th;
}

// eta* by grid search (maximization, internally negated) with an exact
// penalty on the input constraints.
inline std::optional<double> eta(const dea::Dataset& d, const dea::Point& p,
                                 std::size_t steps = 12, std::size_t rounds = 30) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    auto evaluate = [&](const std::vector<double>& lam) {
        double viol = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double x = 0.0;
            for (std::size_t j = 0; j < n; ++j) x += d.inputs(j, k) * lam[j];
            viol += std::max(0.0, (x - p.x[k]) / (1.0 + p.x[k]));
        }
        double et = dea::kInf;
        for (std::size_t i = 0; i < r; ++i) {
            double y = 0.0;
            for (std::size_t j = 0; j < n; ++j) y += d.outputs(j, i) * lam[j];
            if (p.y[i] > 0.0) et = std::min(et, y / p.y[i]);
        }
        return std::make_pair(et, viol);
    };
    auto score = [&](const std::vector<double>& lam) -> std::optional<double> {
        const auto [et, viol] = evaluate(lam);
        if (!std::isfinite(et)) return std::nullopt;
        return -et + 1e4 * viol;
    };
    auto best = detail::refine(n, score, steps, rounds);
    if (!best) return std::nullopt;
    const auto [et, viol] = evaluate(best->second);
    if (viol > 1e-7 || !std::isfinite(et)) return std::nullopt;
    return et;
}

// Largest range-normalized uniform improvement step from p (clamped at 0);
// nullopt when even the unimproved point is unreachable on the grid.
inline std::optional<double> wpe_gap(const dea::Dataset& d, const dea::Point& p,
                                     std::size_t steps = 12, std::size_t rounds = 30) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    const auto stats = dea::column_stats(d);
    auto score = [&](const std::vector<double>& lam) -> std::optional<double> {
        double delta = dea::kInf;
        for (std::size_t k = 0; k < m; ++k) {
            double x = 0.0;
            for (std::size_t j = 0; j < n; ++j) x += d.inputs(j, k) * lam[j];
            delta = std::min(delta, (p.x[k] - x) / stats.input_cols[k].range_unit);
        }
        for (std::size_t i = 0; i < r; ++i) {
            double y = 0.0;
            for (std::size_t j = 0; j < n; ++j) y += d.outputs(j, i) * lam[j];
            delta = std::min(delta, (y - p.y[i]) / stats.output_cols[i].range_unit);
        }
        return -delta;  // maximize
    };
    auto best = detail::refine(n, score, steps, rounds);
    if (!best) return std::nullopt;
    const double gap = -best->first;
    if (gap < -1e-9) return std::nullopt;  // outside the PPS
    return std::max(0.0, gap);
}

}  // namespace grid

}  // namespace oracle
