#pragma once

// Extreme-efficient units and terminal directions. A terminal unit is an
// extreme efficient unit with an infinite edge of the PPS leaving it; the
// only possible edge directions are single input increases (e_k, 0) and
// single output decreases -(0, e_i). Detection works on the generator
// representation: a probe point one step out along the ray must lie on the
// boundary and have exactly {unit, direction} as its minimal-face generators.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dea/bcc.hpp"
#include "dea/dataset.hpp"

namespace dea {

struct Direction {
    enum class Kind : char { input_increase, output_decrease };
    Kind kind = Kind::input_increase;
    std::size_t axis = 0;  // 0-based coordinate index within its kind

    friend bool operator==(const Direction& a, const Direction& b) {
        return a.kind == b.kind && a.axis == b.axis;
    }
    friend bool operator<(const Direction& a, const Direction& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.axis < b.axis;
    }
};

inline Direction input_increase(std::size_t axis) {
    return Direction{Direction::Kind::input_increase, axis};
}
inline Direction output_decrease(std::size_t axis) {
    return Direction{Direction::Kind::output_decrease, axis};
}

struct TerminalReport {
    /// Direction sets per unit id; empty set for non-terminal units.
    std::map<std::string, std::set<Direction>> directions;
    /// Unit ids with at least one terminal direction, in dataset order.
    std::vector<std::string> terminal_units;

    bool is_terminal(const std::string& id) const {
        auto it = directions.find(id);
        return it != directions.end() && !it->second.empty();
    }
};

/// Definition-level efficiency: radial score one and zero maximal slacks.
/// For the variable-returns model the input and output tests agree, so a
/// single orientation decides.
inline bool is_efficient(const Dataset& d, std::size_t j, const LpOptions& options = {}) {
    const auto stats = column_stats(d);
    auto ev = bcc_input(d, d.point(j), options);
    if (std::abs(ev.score - 1.0) > options.tol.zero_abs(1.0)) return false;
    return ev.slacks_zero(stats, options.tol);
}

/// True iff unit j is efficient and is a vertex of the PPS, i.e. the system
/// spanned by the remaining units cannot represent it.
inline bool is_extreme_efficient(const Dataset& d, std::size_t j, const LpOptions& options = {}) {
    if (j >= d.units()) throw InputError("unit index out of range");
    if (!is_efficient(d, j, options)) return false;
    if (d.units() == 1) return true;
    Dataset rest = d;
    rest.remove_unit(j);
    return !membership(rest, d.point(j), options);
}

namespace terminal_detail {

// Maximal coefficient of one generator over all representations
// p = sum lambda_j (X_j,Y_j) + sum mu_k (e_k,0) - sum nu_i (0,e_i), sum lambda = 1.
// generator: unit index, or n+k for input ray k, or n+m+i for output ray i.
// Returns a negative value when p admits no representation at all.
inline double max_generator_coefficient(const Dataset& d, const Point& p, std::size_t generator,
                                        const LpOptions& options = {}) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem lp = LpProblem::with_dims(m + r + 1, n + m + r);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(k, j) = d.inputs(j, k);
        lp.matrix(k, n + k) = 1.0;  // mu_k
        lp.rhs[k] = p.x[k];
        lp.senses[k] = RowSense::eq;
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(m + i, j) = d.outputs(j, i);
        lp.matrix(m + i, n + m + i) = -1.0;  // -nu_i
        lp.rhs[m + i] = p.y[i];
        lp.senses[m + i] = RowSense::eq;
    }
    for (std::size_t j = 0; j < n; ++j) lp.matrix(m + r, j) = 1.0;
    lp.rhs[m + r] = 1.0;
    lp.senses[m + r] = RowSense::eq;
    lp.objective[generator] = -1.0;
    auto s = solve_lp(lp, options);
    if (s.status == LpStatus::infeasible) return -1.0;
    if (s.status == LpStatus::unbounded) return kInf;  // ray coefficients can be unbounded
    return -s.objective_value;
}

}  // namespace terminal_detail

/// Generators of the minimal face containing p: the units and recession
/// directions that attain a positive coefficient in some representation of p.
/// Coefficients at or below the zero tolerance count as absent.
inline std::pair<std::vector<std::size_t>, std::vector<Direction>> minimal_face_generators(
    const Dataset& d, const Point& p, const LpOptions& options = {}) {
    bcc_detail::check_target(d, p);
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    const auto stats = column_stats(d);
    std::vector<std::size_t> units;
    std::vector<Direction> rays;
    bool first = true;
    for (std::size_t g = 0; g < n + m + r; ++g) {
        const double coeff = terminal_detail::max_generator_coefficient(d, p, g, options);
        if (first && coeff < 0.0)
            throw OutsidePpsError("point admits no generator representation");
        first = false;
        double scale = 1.0;  // lambda coefficients live on [0,1]
        if (g >= n && g < n + m)
            scale = 1.0 / std::max(stats.input_cols[g - n].range_unit, 1e-300);
        else if (g >= n + m)
            scale = 1.0 / std::max(stats.output_cols[g - n - m].range_unit, 1e-300);
        if (coeff * scale <= options.tol.zero_abs(1.0)) continue;
        if (g < n)
            units.push_back(g);
        else if (g < n + m)
            rays.push_back(input_increase(g - n));
        else
            rays.push_back(output_decrease(g - n - m));
    }
    return {units, rays};
}

namespace terminal_detail {

// Edge test for one (unit, direction) pair with early exit: the probe one
// range-unit out along the ray must be boundary and no generator other than
// {unit, direction} may carry weight.
inline bool direction_is_terminal(const Dataset& d, std::size_t j, const Direction& dir,
                                  const DatasetStats& stats, double probe_scale,
                                  const LpOptions& options = {}) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    Point probe = d.point(j);
    if (dir.kind == Direction::Kind::input_increase)
        probe.x[dir.axis] += probe_scale * stats.input_cols[dir.axis].range_unit;
    else
        probe.y[dir.axis] -= probe_scale * stats.output_cols[dir.axis].range_unit;

    // boundary test: rays along terminal directions stay on Bound T
    if (bcc_detail::wpe_gap_unchecked(d, probe, stats, options) > options.tol.zero_abs(1.0))
        return false;

    const std::size_t dir_gen =
        dir.kind == Direction::Kind::input_increase ? n + dir.axis : n + m + dir.axis;
    // required generators first: both must carry weight
    if (max_generator_coefficient(d, probe, j, options) <= options.tol.zero_abs(1.0)) return false;
    {
        const double unit_scale =
            dir.kind == Direction::Kind::input_increase
                ? stats.input_cols[dir.axis].range_unit
                : stats.output_cols[dir.axis].range_unit;
        const double coeff = max_generator_coefficient(d, probe, dir_gen, options);
        if (coeff / unit_scale <= options.tol.zero_abs(1.0)) return false;
    }
    // every other generator must be absent
    for (std::size_t g = 0; g < n + m + r; ++g) {
        if (g == j || g == dir_gen) continue;
        double scale = 1.0;
        if (g >= n && g < n + m)
            scale = stats.input_cols[g - n].range_unit;
        else if (g >= n + m)
            scale = stats.output_cols[g - n - m].range_unit;
        const double coeff = max_generator_coefficient(d, probe, g, options);
        if (coeff / scale > options.tol.zero_abs(1.0)) return false;
    }
    return true;
}

}  // namespace terminal_detail

/// Terminal directions of unit j (empty unless j is extreme efficient).
/// `probe_scale` is the probe offset in column-range units; any positive
/// value decides the whole ray by polyhedral convexity.
inline std::set<Direction> terminal_directions(const Dataset& d, std::size_t j,
                                               const LpOptions& options = {},
                                               double probe_scale = 1.0) {
    std::set<Direction> dirs;
    if (!is_extreme_efficient(d, j, options)) return dirs;
    const auto stats = column_stats(d);
    for (std::size_t k = 0; k < d.num_inputs(); ++k)
        if (terminal_detail::direction_is_terminal(d, j, input_increase(k), stats, probe_scale,
                                                   options))
            dirs.insert(input_increase(k));
    for (std::size_t i = 0; i < d.num_outputs(); ++i)
        if (terminal_detail::direction_is_terminal(d, j, output_decrease(i), stats, probe_scale,
                                                   options))
            dirs.insert(output_decrease(i));
    return dirs;
}

/// Scans the dataset for terminal units. Deterministic: units are visited
/// and reported in dataset order.
inline TerminalReport find_terminal_units(const Dataset& d, const LpOptions& options = {}) {
    TerminalReport report;
    for (std::size_t j = 0; j < d.units(); ++j) {
        auto dirs = terminal_directions(d, j, options);
        if (!dirs.empty()) report.terminal_units.push_back(d.ids[j]);
        report.directions[d.ids[j]] = std::move(dirs);
    }
    return report;
}

}  // namespace dea
