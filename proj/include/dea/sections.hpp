#pragma once

// Two-dimensional sections of the frontier: input isoquants (S1), output
// isoquants (S2) and input-output curves (S3), traced as piecewise-linear
// polylines. The sweep samples the first axis, adaptively bisects intervals
// that contain a slope break, and snaps each breakpoint to the intersection
// of the adjacent segment lines.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dea/bcc.hpp"
#include "dea/dataset.hpp"

namespace dea {

enum class SectionKind : char { S1, S2, S3 };

inline const char* to_string(SectionKind k) {
    switch (k) {
        case SectionKind::S1: return "S1";
        case SectionKind::S2: return "S2";
        case SectionKind::S3: return "S3";
    }
    return "?";
}

/// A section plane through `base`. Axis conventions (0-based):
///   S1: first_axis, second_axis are distinct input indices.
///   S2: distinct output indices.
///   S3: first_axis is an input index (horizontal), second_axis an output index.
struct SectionSpec {
    Point base;
    SectionKind kind = SectionKind::S1;
    std::size_t first_axis = 0;
    std::size_t second_axis = 0;

    void validate(const Dataset& d) const {
        const std::size_t m = d.num_inputs(), r = d.num_outputs();
        if (base.x.size() != m || base.y.size() != r)
            throw InputError("section base dimensions do not match dataset");
        switch (kind) {
            case SectionKind::S1:
                if (first_axis >= m || second_axis >= m) throw InputError("S1 axis out of range");
                if (first_axis == second_axis) throw InputError("S1 axes must be distinct");
                break;
            case SectionKind::S2:
                if (first_axis >= r || second_axis >= r) throw InputError("S2 axis out of range");
                if (first_axis == second_axis) throw InputError("S2 axes must be distinct");
                break;
            case SectionKind::S3:
                if (first_axis >= m) throw InputError("S3 input axis out of range");
                if (second_axis >= r) throw InputError("S3 output axis out of range");
                break;
        }
    }
};

struct RayMark {
    enum class Shape : char { vertical, horizontal };
    Shape shape = Shape::vertical;
};

struct SectionPolyline {
    std::vector<std::pair<double, double>> vertices;  // (first-axis, second-axis)
    std::optional<RayMark> left_ray;
    std::optional<RayMark> right_ray;
    long sample_count = 0;
    std::string note;  // diagnostic for degenerate sections

    bool empty() const { return vertices.empty(); }
};

namespace section_detail {

// Constraint frame shared by the boundary and domain solves: lambda columns,
// the section's off-plane coordinates pinned to the base point by disposal
// inequalities, convexity row. Rows for the two section axes are appended by
// the caller.
struct Frame {
    const Dataset& d;
    const SectionSpec& spec;

    std::size_t input_axis_a() const {
        return spec.kind == SectionKind::S2 ? SIZE_MAX : spec.first_axis;
    }
    std::size_t input_axis_b() const {
        return spec.kind == SectionKind::S1 ? spec.second_axis : SIZE_MAX;
    }
    std::size_t output_axis_a() const {
        return spec.kind == SectionKind::S2 ? spec.first_axis : SIZE_MAX;
    }
    std::size_t output_axis_b() const {
        return spec.kind == SectionKind::S1 ? SIZE_MAX : spec.second_axis;
    }
};

// Builds the LP: vars lambda(n) [+ w]. Rows: off-plane inputs <=, off-plane
// outputs >=, convexity ==; then optional first-axis row and second-axis row.
// first_bound: if set, constrain the first-axis coordinate (<= v for inputs,
// >= v for outputs). with_w: add the w variable tied to the second axis.
// second_bound: if set (and !with_w), constrain the second axis coordinate.
inline LpProblem build(const Frame& f, std::optional<double> first_bound, bool with_w,
                       std::optional<double> second_bound) {
    const Dataset& d = f.d;
    const std::size_t n = d.units(), m = d.num_inputs(), r = d.num_outputs();
    std::size_t rows = m + r + 1;  // off-plane rows count <= m+r, plus convexity + axis rows
    const std::size_t cols = n + (with_w ? 1 : 0);
    LpProblem p = LpProblem::with_dims(rows + 1, cols);  // generous; trimmed below
    std::size_t row = 0;
    auto lam_row = [&](const Matrix& mat, std::size_t c) {
        for (std::size_t j = 0; j < n; ++j) p.matrix(row, j) = mat(j, c);
    };
    for (std::size_t k = 0; k < m; ++k) {
        const bool is_a = k == f.input_axis_a(), is_b = k == f.input_axis_b();
        if (is_a || is_b) continue;
        lam_row(d.inputs, k);
        p.rhs[row] = f.spec.base.x[k];
        p.senses[row] = RowSense::le;
        ++row;
    }
    for (std::size_t i = 0; i < r; ++i) {
        const bool is_a = i == f.output_axis_a(), is_b = i == f.output_axis_b();
        if (is_a || is_b) continue;
        lam_row(d.outputs, i);
        p.rhs[row] = f.spec.base.y[i];
        p.senses[row] = RowSense::ge;
        ++row;
    }
    for (std::size_t j = 0; j < n; ++j) p.matrix(row, j) = 1.0;
    p.rhs[row] = 1.0;
    p.senses[row] = RowSense::eq;
    ++row;
    if (first_bound) {
        if (f.input_axis_a() != SIZE_MAX) {
            lam_row(d.inputs, f.input_axis_a());
            p.senses[row] = RowSense::le;
        } else {
            lam_row(d.outputs, f.output_axis_a());
            p.senses[row] = RowSense::ge;
        }
        p.rhs[row] = *first_bound;
        ++row;
    }
    if (with_w) {
        const std::size_t w = n;
        if (f.input_axis_b() != SIZE_MAX) {
            lam_row(d.inputs, f.input_axis_b());
            p.matrix(row, w) = -1.0;  // sum x_b lambda <= w
            p.senses[row] = RowSense::le;
        } else {
            lam_row(d.outputs, f.output_axis_b());
            p.matrix(row, w) = -1.0;  // sum y_b lambda >= w
            p.senses[row] = RowSense::ge;
        }
        p.rhs[row] = 0.0;
        ++row;
    } else if (second_bound) {
        if (f.input_axis_b() != SIZE_MAX) {
            lam_row(d.inputs, f.input_axis_b());
            p.senses[row] = RowSense::le;
        } else {
            lam_row(d.outputs, f.output_axis_b());
            p.senses[row] = RowSense::ge;
        }
        p.rhs[row] = *second_bound;
        ++row;
    }
    // trim unused rows
    LpProblem q = LpProblem::with_dims(row, cols);
    for (std::size_t i = 0; i < row; ++i) {
        for (std::size_t j = 0; j < cols; ++j) q.matrix(i, j) = p.matrix(i, j);
        q.rhs[i] = p.rhs[i];
        q.senses[i] = p.senses[i];
    }
    return q;
}

// Optimizes `coordinate of axis` over the frame. axis_first selects which
// axis; minimize for inputs, maximize for outputs.
inline std::optional<double> extreme_axis_value(const Frame& f, bool axis_first,
                                                std::optional<double> other_bound,
                                                const LpOptions& options) {
    const bool first_is_input = f.input_axis_a() != SIZE_MAX;
    const bool second_is_input = f.input_axis_b() != SIZE_MAX;
    LpProblem p = axis_first ? build(f, std::nullopt, false, other_bound)
                             : build(f, other_bound, false, std::nullopt);
    const Dataset& d = f.d;
    const std::size_t n = d.units();
    const bool is_input = axis_first ? first_is_input : second_is_input;
    const std::size_t col = axis_first
                                ? (first_is_input ? f.input_axis_a() : f.output_axis_a())
                                : (second_is_input ? f.input_axis_b() : f.output_axis_b());
    for (std::size_t j = 0; j < n; ++j)
        p.objective[j] = (is_input ? 1.0 : -1.0) *
                         (is_input ? d.inputs(j, col) : d.outputs(j, col));
    auto s = solve_lp(p, options);
    if (s.status != LpStatus::optimal) return std::nullopt;
    return is_input ? s.objective_value : -s.objective_value;
}

}  // namespace section_detail

/// Boundary value of the section's second axis at a fixed first-axis value:
/// the minimal second input (S1) or maximal second output (S2, S3) reachable
/// inside the PPS with all off-plane coordinates pinned to the base point.
/// Returns nothing when the first-axis value lies outside the section domain.
inline std::optional<double> boundary_point(const Dataset& d, const SectionSpec& spec,
                                            double first_axis_value,
                                            const LpOptions& options = {}) {
    spec.validate(d);
    section_detail::Frame f{d, spec};
    LpProblem p = section_detail::build(f, first_axis_value, true, std::nullopt);
    const std::size_t w = d.units();
    p.objective[w] = spec.kind == SectionKind::S1 ? 1.0 : -1.0;
    auto s = solve_lp(p, options);
    if (s.status != LpStatus::optimal) return std::nullopt;
    return spec.kind == SectionKind::S1 ? s.objective_value : -s.objective_value;
}

/// Sweeps the section and emits the minimal piecewise-linear vertex set plus
/// unbounded tail markers. `samples` controls the initial uniform sweep;
/// breakpoints are localized by bisection and snapped to segment-line
/// intersections, so doubling `samples` leaves vertices in place.
inline SectionPolyline section_polyline(const Dataset& d, const SectionSpec& spec,
                                        long samples = 64, const LpOptions& options = {}) {
    spec.validate(d);
    if (samples < 2) throw InputError("section sweep needs at least two samples");
    section_detail::Frame f{d, spec};
    SectionPolyline out;

    // Domain of the first axis between the sharp end and the start of the
    // weakly efficient plateau of the second axis.
    auto v_sharp = section_detail::extreme_axis_value(f, true, std::nullopt, options);
    auto w_flat = section_detail::extreme_axis_value(f, false, std::nullopt, options);
    if (!v_sharp || !w_flat) {
        out.note = "section domain empty";
        return out;
    }
    const double flat_band = 1e-9 * (1.0 + std::abs(*w_flat));
    const double flat_bound =
        spec.kind == SectionKind::S1 ? *w_flat + flat_band : *w_flat - flat_band;
    auto v_plateau = section_detail::extreme_axis_value(f, true, flat_bound, options);
    if (!v_plateau) {
        out.note = "section domain empty";
        return out;
    }

    double v_lo = *v_sharp, v_hi = *v_plateau;
    if (spec.kind == SectionKind::S2) std::swap(v_lo, v_hi);  // outputs sweep toward max
    const double range = v_hi - v_lo;

    auto eval = [&](double v) -> double {
        ++out.sample_count;
        auto w = boundary_point(d, spec, v, options);
        if (!w) throw NumericalError("section: boundary solve failed inside domain", 0);
        return *w;
    };

    // Ray shapes by section type: the sharp end carries the vertical tail for
    // S1/S3 and sits on the right for S2; the plateau end is horizontal.
    if (spec.kind == SectionKind::S1) {
        out.left_ray = RayMark{RayMark::Shape::vertical};
        out.right_ray = RayMark{RayMark::Shape::horizontal};
    } else if (spec.kind == SectionKind::S2) {
        out.left_ray = RayMark{RayMark::Shape::horizontal};
        out.right_ray = RayMark{RayMark::Shape::vertical};
    } else {
        out.left_ray = RayMark{RayMark::Shape::vertical};
        out.right_ray = RayMark{RayMark::Shape::horizontal};
    }

    if (!(range > 1e-12 * (1.0 + std::abs(v_lo)))) {
        out.vertices.emplace_back(v_lo, eval(v_lo));
        return out;
    }

    // Initial uniform sweep.
    std::vector<std::pair<double, double>> pts;
    for (long s = 0; s <= samples; ++s) {
        const double v = v_lo + range * static_cast<double>(s) / static_cast<double>(samples);
        pts.emplace_back(v, eval(v));
    }
    double w_scale = 0.0;
    for (auto& [v, w] : pts) w_scale = std::max(w_scale, std::abs(w));
    const double dev_tol = 1e-9 * (1.0 + w_scale);
    const double min_width = 1e-7 * range;

    // Adaptive bisection: split intervals whose midpoint leaves the secant.
    for (std::size_t i = 0; i + 1 < pts.size();) {
        const auto [va, wa] = pts[i];
        const auto [vb, wb] = pts[i + 1];
        if (vb - va <= min_width) { ++i; continue; }
        const double vm = 0.5 * (va + vb);
        const double wm = eval(vm);
        if (std::abs(wm - 0.5 * (wa + wb)) > dev_tol)
            pts.insert(pts.begin() + static_cast<std::ptrdiff_t>(i) + 1, {vm, wm});
        else
            ++i;
    }

    // Group samples into maximal collinear runs and snap breakpoints to the
    // intersection of adjacent segment lines.
    struct Seg { double va, wa, vb, wb; double slope() const { return (wb - wa) / (vb - va); } };
    std::vector<Seg> segs;
    const double slope_scale = std::max(std::abs(pts.back().second - pts.front().second) / range,
                                        1e-12);
    const double slope_tol = 1e-6 * slope_scale;
    std::size_t start = 0;
    for (std::size_t i = 1; i + 1 <= pts.size() - 1; ++i) {
        const Seg cur{pts[start].first, pts[start].second, pts[i].first, pts[i].second};
        const double next_slope =
            (pts[i + 1].second - pts[i].second) / (pts[i + 1].first - pts[i].first);
        if (i > start && std::abs(next_slope - cur.slope()) > slope_tol) {
            segs.push_back(cur);
            start = i;
        }
    }
    segs.push_back({pts[start].first, pts[start].second, pts.back().first, pts.back().second});

    // Bisection leaves sliver intervals straddling each breakpoint; drop them
    // so adjacent true segments intersect cleanly.
    if (segs.size() > 1) {
        std::vector<Seg> wide;
        for (const auto& s : segs)
            if (s.vb - s.va > 4.0 * min_width) wide.push_back(s);
        if (!wide.empty()) segs = std::move(wide);
    }

    out.vertices.emplace_back(pts.front().first, pts.front().second);
    for (std::size_t s = 0; s + 1 < segs.size(); ++s) {
        const Seg &a = segs[s], &b = segs[s + 1];
        const double sa = a.slope(), sb = b.slope();
        double vx, wx;
        if (std::abs(sa - sb) > slope_tol) {
            // intersection of the two segment lines
            vx = (b.wa - sb * b.va - (a.wa - sa * a.va)) / (sa - sb);
            wx = a.wa + sa * (vx - a.va);
            if (!(vx >= a.vb - 2.0 * min_width && vx <= b.va + 2.0 * min_width)) {
                vx = a.vb;  // numerical fallback: the bracketed sample
                wx = a.wb;
            }
        } else {
            vx = a.vb;
            wx = a.wb;
        }
        out.vertices.emplace_back(vx, wx);
    }
    out.vertices.emplace_back(pts.back().first, pts.back().second);

    // Drop duplicates and interior points that are collinear at slope_tol.
    std::vector<std::pair<double, double>> pruned;
    const double vtol = 1e-6 * range;
    for (const auto& v : out.vertices) {
        if (!pruned.empty() && std::abs(v.first - pruned.back().first) <= vtol) continue;
        while (pruned.size() >= 2) {
            const auto& p0 = pruned[pruned.size() - 2];
            const auto& p1 = pruned.back();
            const double s0 = (p1.second - p0.second) / (p1.first - p0.first);
            const double s1 = (v.second - p1.second) / (v.first - p1.first);
            if (std::abs(s1 - s0) > slope_tol) break;
            pruned.pop_back();
        }
        pruned.push_back(v);
    }
    out.vertices = std::move(pruned);
    return out;
}

}  // namespace dea
