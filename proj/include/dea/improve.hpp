#pragma once

// Four-part frontier improvement. Part 1 smooths every terminal unit by
// inserting an artificial unit just outside the PPS on each two-dimensional
// section containing a terminal direction. Part 3 lifts weakly efficient
// radial projections into artificial units on the projection ray. Parts 2
// and 4 are corrective: artificial units that cost an originally efficient
// unit its efficiency are moved back toward the frontier, and artificial
// units that end up inefficient are deleted. On success all originally
// efficient units stay efficient, no original unit stays terminal, and every
// original unit projects onto an efficient face.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dea/classify.hpp"
#include "dea/sections.hpp"
#include "dea/terminal.hpp"

namespace dea {

class DegeneratePlacementError : public Error {
  public:
    using Error::Error;
};

struct ImproveParams {
    double along_step = 0.5;       // t: move along the terminal direction, column-range units
    double exterior_offset = 0.25; // eps0: initial exterior offset, column-range units
    double shrink_factor = 0.5;    // geometric shrink of eps on rejection
    double radial_offset = 0.9;    // alpha0: initial radial scaling of part-3 projections
    int max_halvings = 50;
    bool shrink_all = false;       // corrective passes move every live artificial, not only
                                   // the ones referenced by a broken unit
    LpOptions lp;

    void validate() const {
        if (!(along_step > 0.0) || !(exterior_offset > 0.0))
            throw InputError("improve: steps must be positive");
        if (!(shrink_factor > 0.0 && shrink_factor < 1.0))
            throw InputError("improve: shrink factor must lie in (0,1)");
        if (!(radial_offset > 0.0 && radial_offset < 1.0))
            throw InputError("improve: radial offset must lie in (0,1)");
        if (max_halvings < 1) throw InputError("improve: max halvings must be >= 1");
    }
};

enum class ArtificialStatus : char { kept, deleted_inefficient, abandoned_underflow };

inline const char* to_string(ArtificialStatus s) {
    switch (s) {
        case ArtificialStatus::kept: return "kept";
        case ArtificialStatus::deleted_inefficient: return "deleted-inefficient";
        case ArtificialStatus::abandoned_underflow: return "abandoned-underflow";
    }
    return "?";
}

struct ArtificialUnit {
    enum class Source : char { terminal_smoothing, weak_projection };

    std::string id;
    Point coords;
    Source source = Source::terminal_smoothing;
    std::string origin_unit;
    // part-1 frame
    std::optional<Direction> direction;
    std::optional<SectionSpec> section;
    Point anchor;               // part 1: origin moved t along the direction; part 3: projection
    bool paired_is_input = false;
    std::size_t paired_axis = 0;
    double paired_unit = 1.0;   // column-range unit of the paired coordinate
    // part-3 frame
    Orientation orientation = Orientation::input;
    // shared
    double offset = 0.0;  // eps for part 1, alpha for part 3
    ArtificialStatus status = ArtificialStatus::kept;

    /// Coordinates implied by the provenance frame at the current offset.
    Point position() const {
        Point p = anchor;
        if (source == Source::terminal_smoothing) {
            if (paired_is_input)
                p.x[paired_axis] = std::max(0.0, anchor.x[paired_axis] - offset * paired_unit);
            else
                p.y[paired_axis] = anchor.y[paired_axis] + offset * paired_unit;
        } else {
            if (orientation == Orientation::input)
                for (auto& v : p.x) v *= offset;
            else
                for (auto& v : p.y) v /= offset;
        }
        return p;
    }

    void move_closer(double shrink_factor) {
        if (source == Source::terminal_smoothing)
            offset *= shrink_factor;
        else
            offset = 0.5 * (1.0 + offset);
        coords = position();
    }
};

struct ImproveLogEvent {
    int part = 1;
    std::string unit;
    std::string direction = "-";  // "in:k" / "out:i" / "-"
    std::string section = "-";    // "a,b" (1-based) / "-"
    double epsilon = 0.0;
    bool accepted = false;
    std::size_t efficient_count = 0;
};

struct UnitBeforeAfter {
    std::string id;
    UnitClass before_class = UnitClass::inefficient;
    UnitClass after_class = UnitClass::inefficient;
    double before_theta = 0.0, after_theta = 0.0;
    double before_eta = 0.0, after_eta = 0.0;  // zero for zero-output units
    bool before_weak = false, after_weak = false;
};

struct ImprovementResult {
    Dataset improved;
    std::vector<ArtificialUnit> artificials;
    std::vector<ImproveLogEvent> log;
    std::vector<UnitBeforeAfter> units;
    TerminalReport terminal_before;
    bool efficiency_preserved = false;   // every originally efficient unit stays efficient
    bool originals_nonterminal = false;  // no original unit is terminal afterwards
    bool projections_efficient = false;  // all original units project with zero slacks
    std::vector<std::string> failures;

    bool certified() const {
        return efficiency_preserved && originals_nonterminal && projections_efficient;
    }
};

/// Raised when a corrective loop cannot restore efficiency within the halving
/// budget, or when the final certification fails. Carries whatever was built.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, std::vector<std::string> broken,
                     std::shared_ptr<ImprovementResult> partial = nullptr)
        : Error(what), broken_units(std::move(broken)), partial_result(std::move(partial)) {}
    std::vector<std::string> broken_units;
    std::shared_ptr<ImprovementResult> partial_result;
};

namespace improve_detail {

inline std::string direction_label(const Direction& d) {
    return (d.kind == Direction::Kind::input_increase ? "in:" : "out:") +
           std::to_string(d.axis + 1);
}

inline std::string section_label(const SectionSpec& s) {
    return std::to_string(s.first_axis + 1) + "," + std::to_string(s.second_axis + 1);
}

// Protects the originally efficient units through the insertion loops. The
// classification tolerance is far too coarse for acceptance tests: a
// candidate nibbling a unit by half a tolerance would still "pass", and a few
// hundred accepted candidates later the unit sits at the tolerance edge where
// everything breaks. Instead each protected unit gets a fixed baseline
// dominance gap measured on the pristine dataset, and a candidate is
// acceptable only when no protected unit moves measurably beyond its
// baseline. Comparisons against a fixed baseline cannot accumulate.
struct EfficiencyGuard {
    std::vector<std::size_t> units;  // protected unit indices (stable: originals come first)
    std::vector<double> baseline;    // dominance gap of each on the original dataset
    double margin = 1e-7;

    static EfficiencyGuard build(const Dataset& d, const std::vector<std::size_t>& protect,
                                 const LpOptions& options) {
        EfficiencyGuard g;
        g.units = protect;
        g.margin = options.tol.zero * 0.1;
        const auto stats = column_stats(d);
        for (std::size_t j : protect)
            g.baseline.push_back(dominance_gap(d, d.point(j), stats, options));
        return g;
    }

    bool preserved(const Dataset& working, std::size_t which, const LpOptions& options,
                   const DatasetStats& stats) const {
        const double gap = dominance_gap(working, working.point(units[which]), stats, options);
        return gap <= baseline[which] + margin;
    }

    std::size_t count_preserved(const Dataset& working, const LpOptions& options) const {
        const auto stats = column_stats(working);
        std::size_t k = 0;
        for (std::size_t i = 0; i < units.size(); ++i)
            if (preserved(working, i, options, stats)) ++k;
        return k;
    }

    std::vector<std::size_t> broken_units(const Dataset& working,
                                          const LpOptions& options) const {
        const auto stats = column_stats(working);
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < units.size(); ++i)
            if (!preserved(working, i, options, stats)) out.push_back(units[i]);
        return out;
    }
};

inline EfficiencyGuard default_guard(const Dataset& d, const LpOptions& options) {
    std::vector<std::size_t> protect;
    for (std::size_t j = 0; j < d.units(); ++j)
        if (!d.artificial[j] && is_efficient(d, j, options)) protect.push_back(j);
    if (protect.empty()) throw InputError("improve: dataset has no efficient unit");
    return EfficiencyGuard::build(d, protect, options);
}

inline bool duplicates_existing(const Dataset& d, const Point& p, const Tolerances& tol) {
    const auto stats = column_stats(d);
    for (std::size_t j = 0; j < d.units(); ++j) {
        bool same = true;
        for (std::size_t k = 0; k < d.num_inputs() && same; ++k)
            same = std::abs(d.inputs(j, k) - p.x[k]) <= tol.zero_abs(stats.input_cols[k].scale);
        for (std::size_t i = 0; i < d.num_outputs() && same; ++i)
            same = std::abs(d.outputs(j, i) - p.y[i]) <= tol.zero_abs(stats.output_cols[i].scale);
        if (same) return true;
    }
    return false;
}

/// Sections containing a direction, in deterministic order: same-type
/// sections on the partner axes first, then the mixed input-output sections.
inline std::vector<SectionSpec> sections_containing(const Dataset& d, const Point& base,
                                                    const Direction& dir) {
    std::vector<SectionSpec> out;
    const std::size_t m = d.num_inputs(), r = d.num_outputs();
    if (dir.kind == Direction::Kind::input_increase) {
        for (std::size_t j = 0; j < m; ++j)
            if (j != dir.axis) out.push_back({base, SectionKind::S1, dir.axis, j});
        for (std::size_t p = 0; p < r; ++p)
            out.push_back({base, SectionKind::S3, dir.axis, p});
    } else {
        for (std::size_t j = 0; j < r; ++j)
            if (j != dir.axis) out.push_back({base, SectionKind::S2, dir.axis, j});
        for (std::size_t s = 0; s < m; ++s)
            out.push_back({base, SectionKind::S3, s, dir.axis});
    }
    return out;
}

struct PairedAxis {
    bool is_input = false;
    std::size_t axis = 0;
};

inline PairedAxis paired_axis_of(const SectionSpec& section, const Direction& dir) {
    switch (section.kind) {
        case SectionKind::S1:
            return {true, section.first_axis == dir.axis ? section.second_axis
                                                         : section.first_axis};
        case SectionKind::S2:
            return {false, section.first_axis == dir.axis ? section.second_axis
                                                          : section.first_axis};
        case SectionKind::S3:
            // mixed plane: the paired coordinate is the one the direction does
            // not move along
            return dir.kind == Direction::Kind::input_increase
                       ? PairedAxis{false, section.second_axis}
                       : PairedAxis{true, section.first_axis};
    }
    return {};
}

}  // namespace improve_detail

/// Artificial-unit placement for one (unit, direction, section) triple:
/// moves the unit t along the terminal direction (staying inside the PPS) and
/// offsets it eps in the section's paired coordinate in the improving sense
/// (paired input down, paired output up). Both steps are measured in
/// column-range units of `stats`. Coordinates clamp at zero; a paired
/// coordinate already at zero cannot improve and raises
/// DegeneratePlacementError.
inline Point candidate_artificial(const Point& unit, const Direction& dir,
                                  const SectionSpec& section, double t, double eps,
                                  const DatasetStats& stats) {
    Point p = unit;
    if (dir.kind == Direction::Kind::input_increase)
        p.x[dir.axis] += t * stats.input_cols[dir.axis].range_unit;
    else
        p.y[dir.axis] = std::max(0.0, p.y[dir.axis] - t * stats.output_cols[dir.axis].range_unit);

    const auto paired = improve_detail::paired_axis_of(section, dir);
    if (paired.is_input) {
        const double step = eps * stats.input_cols[paired.axis].range_unit;
        if (p.x[paired.axis] <= 0.0)
            throw DegeneratePlacementError("paired input already at zero");
        p.x[paired.axis] = std::max(0.0, p.x[paired.axis] - step);
    } else {
        p.y[paired.axis] += eps * stats.output_cols[paired.axis].range_unit;
    }
    return p;
}

/// Part 1: one candidate per (terminal unit, terminal direction, containing
/// section), each verified outside the PPS and shrunk toward the frontier
/// until every originally efficient unit stays efficient.
inline std::vector<ArtificialUnit> smooth_terminal_units(
    const Dataset& dataset, const TerminalReport& report, const ImproveParams& params,
    std::vector<ImproveLogEvent>* log = nullptr,
    const improve_detail::EfficiencyGuard* known_guard = nullptr) {
    params.validate();
    const auto stats = column_stats(dataset);
    const improve_detail::EfficiencyGuard guard =
        known_guard ? *known_guard : improve_detail::default_guard(dataset, params.lp);

    std::vector<ArtificialUnit> result;
    for (std::size_t j = 0; j < dataset.units(); ++j) {
        if (dataset.artificial[j]) continue;  // artificial terminals stay as they are
        auto it = report.directions.find(dataset.ids[j]);
        if (it == report.directions.end() || it->second.empty()) continue;
        const Point base = dataset.point(j);
        for (const Direction& dir : it->second) {
            for (const SectionSpec& section :
                 improve_detail::sections_containing(dataset, base, dir)) {
                ArtificialUnit art;
                art.source = ArtificialUnit::Source::terminal_smoothing;
                art.origin_unit = dataset.ids[j];
                art.direction = dir;
                art.section = section;
                const auto paired = improve_detail::paired_axis_of(section, dir);
                art.paired_is_input = paired.is_input;
                art.paired_axis = paired.axis;
                art.paired_unit = paired.is_input ? stats.input_cols[paired.axis].range_unit
                                                  : stats.output_cols[paired.axis].range_unit;
                art.anchor = base;
                if (dir.kind == Direction::Kind::input_increase)
                    art.anchor.x[dir.axis] +=
                        params.along_step * stats.input_cols[dir.axis].range_unit;
                else
                    art.anchor.y[dir.axis] = std::max(
                        0.0, art.anchor.y[dir.axis] -
                                 params.along_step * stats.output_cols[dir.axis].range_unit);

                double eps = params.exterior_offset;
                bool accepted = false;
                bool dead = false;
                for (int h = 0; h <= params.max_halvings && !accepted && !dead; ++h) {
                    Point c;
                    try {
                        c = candidate_artificial(base, dir, section, params.along_step, eps,
                                                 stats);
                    } catch (const DegeneratePlacementError&) {
                        dead = true;
                        break;
                    }
                    if (improve_detail::duplicates_existing(dataset, c, params.lp.tol) ||
                        membership(dataset, c, params.lp)) {
                        // not outside the PPS: the frame cannot place this one
                        if (log)
                            log->push_back({1, dataset.ids[j],
                                            improve_detail::direction_label(dir),
                                            improve_detail::section_label(section), eps, false,
                                            guard.units.size()});
                        dead = true;
                        break;
                    }
                    Dataset test = dataset;
                    test.add_unit("__candidate__", c, true);
                    const std::size_t k = guard.count_preserved(test, params.lp);
                    accepted = k == guard.units.size();
                    if (log)
                        log->push_back({1, dataset.ids[j], improve_detail::direction_label(dir),
                                        improve_detail::section_label(section), eps, accepted,
                                        k});
                    if (accepted) {
                        art.offset = eps;
                        art.coords = c;
                        art.status = ArtificialStatus::kept;
                    } else {
                        eps *= params.shrink_factor;
                    }
                }
                if (!accepted) {
                    art.offset = eps;
                    art.coords = art.position();
                    art.status = ArtificialStatus::abandoned_underflow;
                }
                result.push_back(std::move(art));
            }
        }
    }
    return result;
}

namespace improve_detail {

inline Dataset assemble(const Dataset& originals, std::vector<ArtificialUnit>& arts) {
    Dataset working = originals;
    std::size_t counter = 0;
    for (auto& a : arts) {
        if (a.status != ArtificialStatus::kept) continue;
        if (a.id.empty()) {
            std::string id;
            do {
                id = "a" + std::to_string(++counter);
            } while (std::find(working.ids.begin(), working.ids.end(), id) != working.ids.end());
            a.id = id;
        }
        working.add_unit(a.id, a.coords, true);
    }
    return working;
}

inline std::vector<std::size_t> live_positions(const Dataset& originals,
                                               const std::vector<ArtificialUnit>& arts) {
    std::vector<std::size_t> pos;
    std::size_t at = originals.units();
    for (const auto& a : arts) pos.push_back(a.status == ArtificialStatus::kept ? at++ : SIZE_MAX);
    return pos;
}

}  // namespace improve_detail

/// Parts 2 and 4: while an originally efficient unit is no longer efficient
/// on the combined set, move the artificial units its reference mixture
/// leans on closer to the frontier, then delete artificial units that do not
/// classify efficient. `mode` selects which family moves: offset shrinks
/// part-1 units, radial moves part-3 units toward their projection.
inline std::vector<ArtificialUnit> corrective_pass(
    const Dataset& originals, std::vector<ArtificialUnit> arts, const ImproveParams& params,
    ArtificialUnit::Source mode_family, const improve_detail::EfficiencyGuard& guard,
    std::vector<ImproveLogEvent>* log = nullptr) {
    params.validate();
    const int part = mode_family == ArtificialUnit::Source::terminal_smoothing ? 2 : 4;
    int rounds = 0;
    for (;;) {
        Dataset working = improve_detail::assemble(originals, arts);
        const auto positions = improve_detail::live_positions(originals, arts);
        const std::vector<std::size_t> broken = guard.broken_units(working, params.lp);
        if (broken.empty()) break;
        if (++rounds > params.max_halvings) {
            std::vector<std::string> ids;
            for (auto j : broken) ids.push_back(originals.ids[j]);
            throw ConvergenceError("corrective pass failed to restore efficiency", ids);
        }

        // artificial units carrying weight in a broken unit's reference mixture
        std::set<std::size_t> responsible;
        for (std::size_t j : broken) {
            const auto ev = bcc_input(working, working.point(j), params.lp);
            for (std::size_t a = 0; a < arts.size(); ++a) {
                if (positions[a] == SIZE_MAX) continue;
                if (ev.lambdas[positions[a]] > params.lp.tol.zero_abs(1.0)) responsible.insert(a);
            }
        }
        if (params.shrink_all || responsible.empty())
            for (std::size_t a = 0; a < arts.size(); ++a)
                if (positions[a] != SIZE_MAX) responsible.insert(a);

        // restrict to the pass family unless that leaves nothing to move
        std::set<std::size_t> movers;
        for (std::size_t a : responsible)
            if (arts[a].source == mode_family) movers.insert(a);
        if (movers.empty()) movers = responsible;

        const std::size_t eff_now = guard.units.size() - broken.size();
        for (std::size_t a : movers) {
            arts[a].move_closer(params.shrink_factor);
            if (log)
                log->push_back({part, arts[a].id.empty() ? arts[a].origin_unit : arts[a].id,
                                arts[a].direction
                                    ? improve_detail::direction_label(*arts[a].direction)
                                    : "-",
                                arts[a].section ? improve_detail::section_label(*arts[a].section)
                                                : "-",
                                arts[a].offset, false, eff_now});
        }
    }

    // Deletion sweep. Inefficient artificial units are dominated points, so
    // removing them in one batch leaves the PPS unchanged; weakly efficient
    // ones are removed only when the remaining units still represent them
    // (again PPS-preserving), otherwise deleting could re-expose a weak face.
    for (;;) {
        Dataset working = improve_detail::assemble(originals, arts);
        const auto positions = improve_detail::live_positions(originals, arts);
        bool changed = false;
        for (std::size_t a = 0; a < arts.size(); ++a) {
            if (positions[a] == SIZE_MAX) continue;
            const UnitClass cls = classify(working, positions[a], params.lp);
            if (cls == UnitClass::extreme_efficient || cls == UnitClass::efficient_nonextreme)
                continue;
            bool removable = cls == UnitClass::inefficient;
            if (!removable) {
                Dataset rest = working;
                rest.remove_unit(positions[a]);
                removable = membership(rest, arts[a].coords, params.lp);
            }
            if (!removable) continue;
            arts[a].status = ArtificialStatus::deleted_inefficient;
            changed = true;
            if (log)
                log->push_back({part, arts[a].id, "-", "-", arts[a].offset, false,
                                guard.units.size()});
        }
        if (!changed) break;  // repeat: a removal can demote other artificials
    }
    return arts;
}

/// Part 3: every original unit whose stage-2 evaluation keeps a nonzero
/// maximal slack (in either orientation) gets its radial projection scaled
/// outside the PPS and inserted as an artificial unit, retreating toward the
/// projection while any originally efficient unit objects. Sweeps repeat
/// until no weak projections remain or nothing more can be inserted.
inline std::vector<ArtificialUnit> remove_weak_projections(
    const Dataset& originals, std::vector<ArtificialUnit> arts, const ImproveParams& params,
    const improve_detail::EfficiencyGuard& guard, std::vector<ImproveLogEvent>* log = nullptr) {
    params.validate();
    int sweeps = 0;
    bool changed = true;
    const std::set<std::size_t> efficient_set(guard.units.begin(), guard.units.end());
    while (changed && ++sweeps <= params.max_halvings) {
        changed = false;
        for (std::size_t j = 0; j < originals.units(); ++j) {
            if (originals.artificial[j]) continue;
            if (efficient_set.count(j)) continue;  // only weak or inefficient units project
            for (Orientation o : {Orientation::input, Orientation::output}) {
                Dataset working = improve_detail::assemble(originals, arts);
                const auto stats = column_stats(working);
                const Point target = originals.point(j);
                if (o == Orientation::output) {
                    bool any = false;
                    for (double v : target.y) any |= v > 0.0;
                    if (!any) continue;  // radial output expansion undefined
                }
                const auto ev = evaluate(working, target, o, params.lp);
                if (ev.max_scaled_slack(stats) <= params.lp.tol.zero) continue;

                ArtificialUnit art;
                art.source = ArtificialUnit::Source::weak_projection;
                art.origin_unit = originals.ids[j];
                art.orientation = o;
                art.anchor = target;
                if (o == Orientation::input)
                    for (auto& v : art.anchor.x) v *= ev.score;
                else
                    for (auto& v : art.anchor.y) v *= ev.score;

                bool degenerate = true;
                for (double v : o == Orientation::input ? art.anchor.x : art.anchor.y)
                    degenerate &= v <= 0.0;
                if (degenerate) continue;  // zero projection cannot move radially

                double alpha = params.radial_offset;
                bool accepted = false;
                for (int h = 0; h <= params.max_halvings && !accepted; ++h) {
                    art.offset = alpha;
                    const Point c = art.position();
                    if (improve_detail::duplicates_existing(working, c, params.lp.tol) ||
                        membership(working, c, params.lp)) {
                        if (log)
                            log->push_back({3, originals.ids[j], "-", "-", alpha, false,
                                            guard.units.size()});
                        break;  // inside the current PPS; nothing to insert
                    }
                    Dataset test = working;
                    test.add_unit("__candidate__", c, true);
                    const std::size_t k = guard.count_preserved(test, params.lp);
                    accepted = k == guard.units.size();
                    if (log)
                        log->push_back({3, originals.ids[j], "-", "-", alpha, accepted, k});
                    if (accepted) {
                        art.coords = c;
                        art.status = ArtificialStatus::kept;
                        arts.push_back(art);
                        changed = true;
                    } else {
                        alpha = 0.5 * (1.0 + alpha);
                    }
                }
                if (!accepted) {
                    art.status = ArtificialStatus::abandoned_underflow;
                    art.coords = art.position();
                    arts.push_back(art);
                }
            }
        }
    }
    return arts;
}

/// Runs the full pipeline and certifies the three postconditions. Throws
/// ConvergenceError (with the partial result attached) when a corrective
/// loop exhausts its budget or certification fails.
inline ImprovementResult improve_frontier(const Dataset& dataset,
                                          const ImproveParams& params = {}) {
    dataset.validate();
    params.validate();

    auto result = std::make_shared<ImprovementResult>();
    const auto before = assess_all(dataset, params.lp);
    std::vector<std::size_t> originals;
    for (std::size_t j = 0; j < dataset.units(); ++j)
        if (!dataset.artificial[j]) originals.push_back(j);
    std::vector<std::size_t> pre_eff;
    for (std::size_t j : originals)
        if (before[j].cls == UnitClass::extreme_efficient ||
            before[j].cls == UnitClass::efficient_nonextreme)
            pre_eff.push_back(j);
    if (pre_eff.empty()) throw InputError("improve: dataset has no efficient unit");
    const auto guard = improve_detail::EfficiencyGuard::build(dataset, pre_eff, params.lp);

    result->terminal_before = find_terminal_units(dataset, params.lp);

    auto arts = smooth_terminal_units(dataset, result->terminal_before, params, &result->log,
                                      &guard);
    try {
        arts = corrective_pass(dataset, std::move(arts), params,
                               ArtificialUnit::Source::terminal_smoothing, guard, &result->log);
        arts = remove_weak_projections(dataset, std::move(arts), params, guard, &result->log);
        arts = corrective_pass(dataset, std::move(arts), params,
                               ArtificialUnit::Source::weak_projection, guard, &result->log);
    } catch (ConvergenceError& e) {
        result->artificials = std::move(arts);
        result->improved = improve_detail::assemble(dataset, result->artificials);
        result->failures.push_back(e.what());
        throw ConvergenceError(e.what(), e.broken_units, result);
    }

    result->artificials = std::move(arts);
    result->improved = improve_detail::assemble(dataset, result->artificials);

    // certification of the three postconditions
    const auto after = assess_all(result->improved, params.lp);
    result->efficiency_preserved = true;
    for (std::size_t j : pre_eff) {
        const bool still = after[j].cls == UnitClass::extreme_efficient ||
                           after[j].cls == UnitClass::efficient_nonextreme;
        if (!still) {
            result->efficiency_preserved = false;
            result->failures.push_back("efficiency lost: " + dataset.ids[j]);
        }
    }
    result->originals_nonterminal = true;
    for (std::size_t j : originals) {
        if (!terminal_directions(result->improved, j, params.lp).empty()) {
            result->originals_nonterminal = false;
            result->failures.push_back("still terminal: " + dataset.ids[j]);
        }
    }
    result->projections_efficient = true;
    {
        const std::set<std::size_t> efficient_set(pre_eff.begin(), pre_eff.end());
        const auto stats = column_stats(result->improved);
        for (std::size_t j : originals) {
            if (efficient_set.count(j)) continue;  // covered by efficiency preservation
            double worst = after[j].input.max_scaled_slack(stats);
            if (!after[j].zero_output)
                worst = std::max(worst, after[j].output.max_scaled_slack(stats));
            if (worst > params.lp.tol.zero) {
                result->projections_efficient = false;
                result->failures.push_back("weak projection remains: " + dataset.ids[j]);
            }
        }
    }

    for (std::size_t j : originals) {
        UnitBeforeAfter row;
        row.id = dataset.ids[j];
        row.before_class = before[j].cls;
        row.after_class = after[j].cls;
        row.before_theta = before[j].input.score;
        row.after_theta = after[j].input.score;
        row.before_eta = before[j].zero_output ? 0.0 : before[j].output.score;
        row.after_eta = after[j].zero_output ? 0.0 : after[j].output.score;
        row.before_weak = before[j].weak_projection;
        row.after_weak = after[j].weak_projection;
        result->units.push_back(std::move(row));
    }

    if (!result->certified())
        throw ConvergenceError("improvement postconditions failed", result->failures, result);
    return std::move(*result);
}

}  // namespace dea
