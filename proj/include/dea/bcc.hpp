#pragma once

// Variable-returns-to-scale envelopment models. Each evaluation is a
// two-stage solve: the radial score first, then the maximal slack sum over
// the optimal face, which separates efficient from weakly efficient points
// without a non-Archimedean constant.

#include <optional>
#include <vector>

#include "dea/dataset.hpp"
#include "dea/lp.hpp"

namespace dea {

enum class Orientation : char { input, output };

struct EfficiencyResult {
    Orientation orientation = Orientation::input;
    double score = 0.0;                 // theta* (input) or eta* (output)
    std::vector<double> input_slacks;   // stage-2 maximal S-
    std::vector<double> output_slacks;  // stage-2 maximal S+
    std::vector<double> lambdas;        // stage-2 intensities
    Point projection;                   // sum lambda_j (X_j, Y_j)

    /// True when every stage-2 slack is zero at the given column scales.
    bool slacks_zero(const DatasetStats& stats, const Tolerances& tol = {}) const {
        for (std::size_t k = 0; k < input_slacks.size(); ++k)
            if (std::abs(input_slacks[k]) > tol.zero_abs(stats.input_cols[k].scale)) return false;
        for (std::size_t i = 0; i < output_slacks.size(); ++i)
            if (std::abs(output_slacks[i]) > tol.zero_abs(stats.output_cols[i].scale)) return false;
        return true;
    }

    double max_scaled_slack(const DatasetStats& stats) const {
        double worst = 0.0;
        for (std::size_t k = 0; k < input_slacks.size(); ++k)
            worst = std::max(worst, std::abs(input_slacks[k]) / (1.0 + stats.input_cols[k].scale));
        for (std::size_t i = 0; i < output_slacks.size(); ++i)
            worst = std::max(worst, std::abs(output_slacks[i]) / (1.0 + stats.output_cols[i].scale));
        return worst;
    }
};

namespace bcc_detail {

inline void check_target(const Dataset& d, const Point& p) {
    if (p.x.size() != d.num_inputs() || p.y.size() != d.num_outputs())
        throw InputError("target point dimensions do not match dataset");
    for (double v : p.x)
        if (!finite(v)) throw InputError("target has non-finite input");
    for (double v : p.y)
        if (!finite(v)) throw InputError("target has non-finite output");
}

// Shared layout of the envelopment system: columns lambda(n), s-(m), s+(r),
// then the radial variable; rows are m input balances, r output balances and
// the convexity row.
inline LpProblem envelopment_frame(const Dataset& d) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem p = LpProblem::with_dims(m + r + 1, n + m + r + 1);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) p.matrix(k, j) = d.inputs(j, k);
        p.matrix(k, n + k) = 1.0;  // s-
        p.senses[k] = RowSense::eq;
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) p.matrix(m + i, j) = d.outputs(j, i);
        p.matrix(m + i, n + m + i) = -1.0;  // s+
        p.senses[m + i] = RowSense::eq;
    }
    for (std::size_t j = 0; j < n; ++j) p.matrix(m + r, j) = 1.0;
    p.rhs[m + r] = 1.0;
    p.senses[m + r] = RowSense::eq;
    return p;
}

inline EfficiencyResult finish(const Dataset& d, Orientation o, double score, const Point& target,
                               const std::vector<double>& stage2_primal) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    EfficiencyResult res;
    res.orientation = o;
    res.score = score;
    res.lambdas.assign(stage2_primal.begin(), stage2_primal.begin() + static_cast<std::ptrdiff_t>(n));
    res.projection.x.assign(m, 0.0);
    res.projection.y.assign(r, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = res.lambdas[j];
        if (lam == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k) res.projection.x[k] += lam * d.inputs(j, k);
        for (std::size_t i = 0; i < r; ++i) res.projection.y[i] += lam * d.outputs(j, i);
    }
    // Slacks are recomputed from the balances at the stage-1 score so the
    // lexicographic tolerance band cannot leak into the reported values.
    res.input_slacks.assign(m, 0.0);
    res.output_slacks.assign(r, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double radial = o == Orientation::input ? score * target.x[k] : target.x[k];
        res.input_slacks[k] = std::max(0.0, radial - res.projection.x[k]);
    }
    for (std::size_t i = 0; i < r; ++i) {
        const double radial = o == Orientation::output ? score * target.y[i] : target.y[i];
        res.output_slacks[i] = std::max(0.0, res.projection.y[i] - radial);
    }
    return res;
}

// Second stage with the radial score pinned exactly: maximize the plain
// slack sum over the stage-1 optimal face. Pinning by substitution (the
// radial term moves into the right-hand side) keeps the face sharp, so the
// reported slacks carry no score-proportional drift; the optimality
// tolerance is tightened accordingly.
inline std::vector<double> pinned_slack_stage(const Dataset& d, const Point& target,
                                              Orientation o, double score,
                                              LpOptions options) {
    options.tol.opt = std::min(options.tol.opt, 1e-9);
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem p = LpProblem::with_dims(m + r + 1, n + m + r);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) p.matrix(k, j) = d.inputs(j, k);
        p.matrix(k, n + k) = 1.0;
        p.senses[k] = RowSense::eq;
        p.rhs[k] = (o == Orientation::input ? score : 1.0) * target.x[k];
        p.objective[n + k] = -1.0;
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) p.matrix(m + i, j) = d.outputs(j, i);
        p.matrix(m + i, n + m + i) = -1.0;
        p.senses[m + i] = RowSense::eq;
        p.rhs[m + i] = (o == Orientation::output ? score : 1.0) * target.y[i];
        p.objective[n + m + i] = -1.0;
    }
    for (std::size_t j = 0; j < n; ++j) p.matrix(m + r, j) = 1.0;
    p.rhs[m + r] = 1.0;
    p.senses[m + r] = RowSense::eq;
    auto s = solve_lp(p, options);
    if (s.status != LpStatus::optimal)
        throw NumericalError("bcc: pinned second stage failed", s.iterations);
    return s.primal;
}

}  // namespace bcc_detail

/// Input-oriented two-stage evaluation of `target` against the PPS spanned by
/// `dataset`. Throws OutsidePpsError for targets no mixture can envelop.
inline EfficiencyResult bcc_input(const Dataset& d, const Point& target,
                                  const LpOptions& options = {}) {
    bcc_detail::check_target(d, target);
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem p = bcc_detail::envelopment_frame(d);
    const std::size_t theta = n + m + r;
    for (std::size_t k = 0; k < m; ++k) p.matrix(k, theta) = -target.x[k];
    for (std::size_t i = 0; i < r; ++i) p.rhs[m + i] = target.y[i];
    p.objective[theta] = 1.0;  // min theta

    auto stage1 = solve_lp(p, options);
    if (stage1.status == LpStatus::infeasible)
        throw OutsidePpsError("target outside the production possibility set");
    if (stage1.status != LpStatus::optimal)
        throw NumericalError("bcc_input: stage 1 failed", stage1.iterations);
    const double score = stage1.objective_value;
    const auto stage2 =
        bcc_detail::pinned_slack_stage(d, target, Orientation::input, score, options);
    return bcc_detail::finish(d, Orientation::input, score, target, stage2);
}

/// Output-oriented two-stage evaluation. Requires a nonzero target output
/// vector (radial expansion is undefined at the origin).
inline EfficiencyResult bcc_output(const Dataset& d, const Point& target,
                                   const LpOptions& options = {}) {
    bcc_detail::check_target(d, target);
    bool any_output = false;
    for (double v : target.y) any_output |= v > 0.0;
    if (!any_output) throw InputError("output orientation undefined for a zero output vector");

    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem p = bcc_detail::envelopment_frame(d);
    const std::size_t eta = n + m + r;
    for (std::size_t k = 0; k < m; ++k) p.rhs[k] = target.x[k];
    for (std::size_t i = 0; i < r; ++i) p.matrix(m + i, eta) = -target.y[i];
    p.objective[eta] = -1.0;  // max eta

    auto stage1 = solve_lp(p, options);
    if (stage1.status == LpStatus::infeasible)
        throw OutsidePpsError("target outside the production possibility set");
    if (stage1.status != LpStatus::optimal)
        throw NumericalError("bcc_output: stage 1 failed", stage1.iterations);
    const double score = -stage1.objective_value;
    const auto stage2 =
        bcc_detail::pinned_slack_stage(d, target, Orientation::output, score, options);
    return bcc_detail::finish(d, Orientation::output, score, target, stage2);
}

inline EfficiencyResult evaluate(const Dataset& d, const Point& target, Orientation o,
                                 const LpOptions& options = {}) {
    return o == Orientation::input ? bcc_input(d, target, options) : bcc_output(d, target, options);
}

/// Membership in the production possibility set (feasibility of the
/// envelopment system with free disposal).
inline bool membership(const Dataset& d, const Point& p, const LpOptions& options = {}) {
    bcc_detail::check_target(d, p);
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem lp = LpProblem::with_dims(m + r + 1, n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(k, j) = d.inputs(j, k);
        lp.rhs[k] = p.x[k];
        lp.senses[k] = RowSense::le;
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(m + i, j) = d.outputs(j, i);
        lp.rhs[m + i] = p.y[i];
        lp.senses[m + i] = RowSense::ge;
    }
    for (std::size_t j = 0; j < n; ++j) lp.matrix(m + r, j) = 1.0;
    lp.rhs[m + r] = 1.0;
    lp.senses[m + r] = RowSense::eq;
    return solve_lp(lp, options).status == LpStatus::optimal;
}

namespace bcc_detail {

// Largest uniform range-normalized improvement step available from p.
// Assumes p is already known to lie in the PPS.
inline double wpe_gap_unchecked(const Dataset& d, const Point& p, const DatasetStats& stats,
                                const LpOptions& options = {}) {
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem lp = LpProblem::with_dims(m + r + 1, n + 1);
    const std::size_t delta = n;
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(k, j) = d.inputs(j, k);
        lp.matrix(k, delta) = stats.input_cols[k].range_unit;
        lp.rhs[k] = p.x[k];
        lp.senses[k] = RowSense::le;
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(m + i, j) = d.outputs(j, i);
        lp.matrix(m + i, delta) = -stats.output_cols[i].range_unit;
        lp.rhs[m + i] = p.y[i];
        lp.senses[m + i] = RowSense::ge;
    }
    for (std::size_t j = 0; j < n; ++j) lp.matrix(m + r, j) = 1.0;
    lp.rhs[m + r] = 1.0;
    lp.senses[m + r] = RowSense::eq;
    lp.objective[delta] = -1.0;  // max delta
    auto s = solve_lp(lp, options);
    if (s.status != LpStatus::optimal)
        throw NumericalError("wpe_gap: solve failed", s.iterations);
    return std::max(0.0, -s.objective_value);
}

}  // namespace bcc_detail

/// Weak-Pareto gap of Definition 3: the largest delta >= 0 such that
/// simultaneously cutting every input and raising every output by delta (in
/// column-range units) stays inside the PPS. Zero exactly on the boundary.
inline double wpe_gap(const Dataset& d, const Point& p, const LpOptions& options = {}) {
    if (!membership(d, p, options))
        throw OutsidePpsError("wpe_gap requires a point of the production possibility set");
    return bcc_detail::wpe_gap_unchecked(d, p, column_stats(d), options);
}

/// Column-normalized maximal slack sum at the point itself (radial factor
/// pinned at one). Zero exactly when no point of the PPS dominates p, i.e.
/// p is Pareto efficient. Solved at a tightened optimality tolerance so the
/// value is usable as a sharp efficiency measure inside the improvement
/// loops, where the classification tolerance would be too coarse.
inline double dominance_gap(const Dataset& d, const Point& p, const DatasetStats& stats,
                            LpOptions options = {}) {
    options.tol.opt = std::min(options.tol.opt, 1e-9);
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    LpProblem lp = LpProblem::with_dims(m + r + 1, n + m + r);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(k, j) = d.inputs(j, k);
        lp.matrix(k, n + k) = 1.0;
        lp.rhs[k] = p.x[k];
        lp.senses[k] = RowSense::eq;
        lp.objective[n + k] = -1.0 / (1.0 + stats.input_cols[k].scale);
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) lp.matrix(m + i, j) = d.outputs(j, i);
        lp.matrix(m + i, n + m + i) = -1.0;
        lp.rhs[m + i] = p.y[i];
        lp.senses[m + i] = RowSense::eq;
        lp.objective[n + m + i] = -1.0 / (1.0 + stats.output_cols[i].scale);
    }
    for (std::size_t j = 0; j < n; ++j) lp.matrix(m + r, j) = 1.0;
    lp.rhs[m + r] = 1.0;
    lp.senses[m + r] = RowSense::eq;
    auto s = solve_lp(lp, options);
    if (s.status != LpStatus::optimal)
        throw NumericalError("dominance_gap: solve failed", s.iterations);
    return std::max(0.0, -s.objective_value);
}

}  // namespace dea
