#pragma once

#include <string>
#include <vector>

#include "dea/bcc.hpp"
#include "dea/terminal.hpp"

namespace dea {

enum class UnitClass : char { extreme_efficient, efficient_nonextreme, weakly_efficient, inefficient };

inline const char* to_string(UnitClass c) {
    switch (c) {
        case UnitClass::extreme_efficient: return "extreme-efficient";
        case UnitClass::efficient_nonextreme: return "efficient-nonextreme";
        case UnitClass::weakly_efficient: return "weakly-efficient";
        case UnitClass::inefficient: return "inefficient";
    }
    return "?";
}

/// Full per-unit evaluation: both orientations, class, and the weak-projection
/// flag used by the improvement loop and the reports.
struct UnitAssessment {
    std::string id;
    EfficiencyResult input;
    EfficiencyResult output;  // score 0 and empty slacks when outputs are all zero
    UnitClass cls = UnitClass::inefficient;
    bool zero_output = false;      // unit produces nothing; flagged in reports
    bool weak_projection = false;  // some orientation's maximal slack is nonzero
};

inline UnitAssessment assess(const Dataset& d, std::size_t j, const LpOptions& options = {}) {
    if (j >= d.units()) throw InputError("unit index out of range");
    const auto stats = column_stats(d);
    UnitAssessment a;
    a.id = d.ids[j];
    const Point p = d.point(j);
    a.input = bcc_input(d, p, options);

    a.zero_output = true;
    for (double v : p.y) a.zero_output &= v <= 0.0;
    bool output_efficient = false;
    bool output_weak_slack = false;
    if (!a.zero_output) {
        a.output = bcc_output(d, p, options);
        output_efficient = std::abs(a.output.score - 1.0) <= options.tol.zero_abs(1.0) &&
                           a.output.slacks_zero(stats, options.tol);
        output_weak_slack = std::abs(a.output.score - 1.0) <= options.tol.zero_abs(1.0) &&
                            !a.output.slacks_zero(stats, options.tol);
    } else {
        a.output.orientation = Orientation::output;
    }

    const bool input_score_one = std::abs(a.input.score - 1.0) <= options.tol.zero_abs(1.0);
    const bool input_efficient = input_score_one && a.input.slacks_zero(stats, options.tol);
    if (input_efficient || output_efficient) {
        a.cls = is_extreme_efficient(d, j, options) ? UnitClass::extreme_efficient
                                                    : UnitClass::efficient_nonextreme;
    } else if ((input_score_one && !a.input.slacks_zero(stats, options.tol)) || output_weak_slack) {
        a.cls = UnitClass::weakly_efficient;
    } else {
        a.cls = UnitClass::inefficient;
    }

    if (a.cls == UnitClass::weakly_efficient || a.cls == UnitClass::inefficient) {
        const double in_slack = a.input.max_scaled_slack(stats);
        const double out_slack = a.zero_output ? 1.0 : a.output.max_scaled_slack(stats);
        a.weak_projection = in_slack > options.tol.zero || out_slack > options.tol.zero;
    }
    return a;
}

inline UnitClass classify(const Dataset& d, std::size_t j, const LpOptions& options = {}) {
    return assess(d, j, options).cls;
}

inline std::vector<UnitAssessment> assess_all(const Dataset& d, const LpOptions& options = {}) {
    std::vector<UnitAssessment> out;
    out.reserve(d.units());
    for (std::size_t j = 0; j < d.units(); ++j) out.push_back(assess(d, j, options));
    return out;
}

struct ClassCounts {
    std::size_t extreme = 0;
    std::size_t nonextreme = 0;
    std::size_t weakly = 0;
    std::size_t inefficient = 0;
    std::size_t weak_projections = 0;  // non-efficient units with a weak projection

    std::size_t efficient() const { return extreme + nonextreme; }
};

inline ClassCounts count_classes(const std::vector<UnitAssessment>& all) {
    ClassCounts c;
    for (const auto& a : all) {
        switch (a.cls) {
            case UnitClass::extreme_efficient: ++c.extreme; break;
            case UnitClass::efficient_nonextreme: ++c.nonextreme; break;
            case UnitClass::weakly_efficient: ++c.weakly; break;
            case UnitClass::inefficient: ++c.inefficient; break;
        }
        if (a.weak_projection) ++c.weak_projections;
    }
    return c;
}

}  // namespace dea
