#pragma once

// Flat-file surface: dataset CSV, key = value config, report CSVs, the
// improvement run log, and the section polyline export.

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dea/classify.hpp"
#include "dea/improve.hpp"
#include "dea/sections.hpp"

namespace dea {

class LoadError : public InputError {
  public:
    using InputError::InputError;
};

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

inline std::string format_value(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw LoadError("trailing characters in number at " + where);
        return v;
    } catch (const LoadError&) {
        throw;
    } catch (const std::exception&) {
        throw LoadError("cannot parse number '" + s + "' at " + where);
    }
}

}  // namespace io_detail

/// Loads a dataset CSV with header `id,x1..xm,y1..yr`. Optional trailing
/// columns `artificial` (0/1) and `provenance` (free text, ignored) are
/// accepted so improved datasets round-trip. Errors name the offending
/// row/column.
inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw LoadError(path + ": empty file");
    const auto header = io_detail::split_csv_line(line);
    if (header.empty() || io_detail::trim(header[0]) != "id")
        throw LoadError(path + ": header must start with 'id'");

    std::size_t m = 0, r = 0;
    std::ptrdiff_t art_col = -1;
    std::ptrdiff_t prov_col = -1;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string name = io_detail::trim(header[c]);
        if (name == "x" + std::to_string(m + 1) && r == 0 && art_col < 0) {
            ++m;
        } else if (name == "y" + std::to_string(r + 1) && art_col < 0) {
            ++r;
        } else if (name == "artificial" && art_col < 0) {
            art_col = static_cast<std::ptrdiff_t>(c);
        } else if (name == "provenance" && art_col >= 0 && prov_col < 0) {
            prov_col = static_cast<std::ptrdiff_t>(c);
        } else {
            throw LoadError(path + ": unexpected header column '" + name + "'");
        }
    }
    if (m == 0 || r == 0) throw LoadError(path + ": header needs x1..xm and y1..yr columns");

    Dataset d;
    d.inputs = Matrix(0, m);
    d.outputs = Matrix(0, r);
    std::vector<std::vector<double>> xs, ys;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (io_detail::trim(line).empty()) continue;
        const auto cells = io_detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw LoadError(path + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        const std::string id = io_detail::trim(cells[0]);
        if (id.empty()) throw LoadError(path + ": row " + std::to_string(row) + " missing id");
        std::vector<double> x(m), y(r);
        for (std::size_t k = 0; k < m; ++k) {
            const std::string cell = io_detail::trim(cells[1 + k]);
            if (cell.empty())
                throw LoadError(path + ": missing cell at row " + std::to_string(row) +
                                " column x" + std::to_string(k + 1));
            x[k] = io_detail::parse_number(cell, "row " + std::to_string(row) + " column x" +
                                                     std::to_string(k + 1));
            if (x[k] < 0)
                throw LoadError(path + ": negative value at row " + std::to_string(row) +
                                " column x" + std::to_string(k + 1));
        }
        for (std::size_t i = 0; i < r; ++i) {
            const std::string cell = io_detail::trim(cells[1 + m + i]);
            if (cell.empty())
                throw LoadError(path + ": missing cell at row " + std::to_string(row) +
                                " column y" + std::to_string(i + 1));
            y[i] = io_detail::parse_number(cell, "row " + std::to_string(row) + " column y" +
                                                     std::to_string(i + 1));
            if (y[i] < 0)
                throw LoadError(path + ": negative value at row " + std::to_string(row) +
                                " column y" + std::to_string(i + 1));
        }
        bool artificial = false;
        if (art_col >= 0) {
            const std::string cell = io_detail::trim(cells[static_cast<std::size_t>(art_col)]);
            artificial = cell == "1" || cell == "true";
        }
        for (const auto& seen : d.ids)
            if (seen == id) throw LoadError(path + ": duplicate id '" + id + "' at row " +
                                            std::to_string(row));
        d.ids.push_back(id);
        xs.push_back(std::move(x));
        ys.push_back(std::move(y));
        d.artificial.push_back(artificial);
    }
    if (d.ids.empty()) throw LoadError(path + ": no data rows");
    d.inputs = Matrix(d.ids.size(), m);
    d.outputs = Matrix(d.ids.size(), r);
    for (std::size_t j = 0; j < d.ids.size(); ++j) {
        for (std::size_t k = 0; k < m; ++k) d.inputs(j, k) = xs[j][k];
        for (std::size_t i = 0; i < r; ++i) d.outputs(j, i) = ys[j][i];
    }
    try {
        d.validate();
    } catch (const InputError& e) {
        throw LoadError(path + ": " + e.what());
    }
    return d;
}

/// Writes a dataset CSV (12 significant digits). Provenance strings, when
/// given, are emitted per unit id alongside the artificial flag.
inline void save_csv(const Dataset& d, const std::string& path,
                     const std::map<std::string, std::string>* provenance = nullptr) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);
    out << "id";
    for (std::size_t k = 0; k < d.num_inputs(); ++k) out << ",x" << k + 1;
    for (std::size_t i = 0; i < d.num_outputs(); ++i) out << ",y" << i + 1;
    bool any_art = false;
    for (bool a : d.artificial) any_art |= a;
    if (any_art || provenance) out << ",artificial";
    if (provenance) out << ",provenance";
    out << "\n";
    for (std::size_t j = 0; j < d.units(); ++j) {
        out << d.ids[j];
        for (std::size_t k = 0; k < d.num_inputs(); ++k)
            out << "," << io_detail::format_value(d.inputs(j, k), 12);
        for (std::size_t i = 0; i < d.num_outputs(); ++i)
            out << "," << io_detail::format_value(d.outputs(j, i), 12);
        if (any_art || provenance) out << "," << (d.artificial[j] ? 1 : 0);
        if (provenance) {
            auto it = provenance->find(d.ids[j]);
            out << "," << (it == provenance->end() ? "" : it->second);
        }
        out << "\n";
    }
}

/// Plain `key = value` configuration with `#` comments. Unknown keys are
/// rejected by the consumer (see RunConfig::apply).
inline std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = io_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw LoadError(path + ": line " + std::to_string(row) + " is not 'key = value'");
        const std::string key = io_detail::trim(line.substr(0, eq));
        const std::string value = io_detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw LoadError(path + ": line " + std::to_string(row) + " is not 'key = value'");
        if (!kv.emplace(key, value).second)
            throw LoadError(path + ": duplicate key '" + key + "'");
    }
    return kv;
}

/// Run configuration: improvement parameters plus the CLI-level knobs.
struct RunConfig {
    ImproveParams improve;
    std::optional<Orientation> orientation;  // filter for eff reports
    long samples = 64;
    std::uint64_t seed = 1;

    void apply(const std::map<std::string, std::string>& kv) {
        for (const auto& [key, value] : kv) {
            if (key == "along_step") improve.along_step = io_detail::parse_number(value, key);
            else if (key == "exterior_offset")
                improve.exterior_offset = io_detail::parse_number(value, key);
            else if (key == "shrink_factor")
                improve.shrink_factor = io_detail::parse_number(value, key);
            else if (key == "radial_offset")
                improve.radial_offset = io_detail::parse_number(value, key);
            else if (key == "max_halvings")
                improve.max_halvings = static_cast<int>(io_detail::parse_number(value, key));
            else if (key == "shrink_all")
                improve.shrink_all = value == "1" || value == "true";
            else if (key == "orientation")
                orientation = value == "output" ? Orientation::output : Orientation::input;
            else if (key == "samples")
                samples = static_cast<long>(io_detail::parse_number(value, key));
            else if (key == "seed")
                seed = static_cast<std::uint64_t>(io_detail::parse_number(value, key));
            else
                throw LoadError("unknown config key '" + key + "'");
        }
        improve.validate();
    }
};

/// Polyline export: header comment, one vertex per line as
/// `first<TAB>second`, ray markers trailing. `base_label` names the unit the
/// section passes through ("free" for ad-hoc points). Optional `annex`
/// carries orthogonal projections of dataset units onto the section plane.
inline void write_polyline(std::ostream& out, const SectionPolyline& pl, const SectionSpec& spec,
                           const std::string& base_label,
                           const std::vector<std::pair<std::string, std::pair<double, double>>>*
                               annex = nullptr) {
    out << "# section kind=" << to_string(spec.kind) << " base=" << base_label << " axes="
        << spec.first_axis + 1 << "," << spec.second_axis + 1 << "\n";
    for (const auto& [v, w] : pl.vertices)
        out << io_detail::format_value(v, 9) << "\t" << io_detail::format_value(w, 9) << "\n";
    if (pl.left_ray) out << "# ray left\n";
    if (pl.right_ray) out << "# ray right\n";
    if (!pl.note.empty()) out << "# note " << pl.note << "\n";
    if (annex)
        for (const auto& [id, vw] : *annex)
            out << "# unit " << id << "\t" << io_detail::format_value(vw.first, 9) << "\t"
                << io_detail::format_value(vw.second, 9) << "\n";
}

inline std::string direction_csv(const std::set<Direction>& dirs) {
    std::string s;
    for (const auto& d : dirs) {
        if (!s.empty()) s += ";";
        s += (d.kind == Direction::Kind::input_increase ? "in" : "out") +
             std::to_string(d.axis + 1);
    }
    return s;
}

inline void write_efficiency_report(std::ostream& out, const Dataset& d,
                                    const std::vector<UnitAssessment>& all, Orientation o) {
    out << "id,score";
    for (std::size_t k = 0; k < d.num_inputs(); ++k) out << ",slack_x" << k + 1;
    for (std::size_t i = 0; i < d.num_outputs(); ++i) out << ",slack_y" << i + 1;
    out << ",class\n";
    for (const auto& a : all) {
        const EfficiencyResult& e = o == Orientation::input ? a.input : a.output;
        out << a.id << "," << io_detail::format_value(e.score, 9);
        for (std::size_t k = 0; k < d.num_inputs(); ++k)
            out << ","
                << io_detail::format_value(k < e.input_slacks.size() ? e.input_slacks[k] : 0.0, 9);
        for (std::size_t i = 0; i < d.num_outputs(); ++i)
            out << ","
                << io_detail::format_value(i < e.output_slacks.size() ? e.output_slacks[i] : 0.0,
                                           9);
        out << "," << to_string(a.cls) << "\n";
    }
}

inline void write_classify_report(std::ostream& out, const std::vector<UnitAssessment>& all) {
    out << "id,class,theta,eta,weak_projection,zero_output\n";
    for (const auto& a : all)
        out << a.id << "," << to_string(a.cls) << "," << io_detail::format_value(a.input.score, 9)
            << "," << io_detail::format_value(a.zero_output ? 0.0 : a.output.score, 9) << ","
            << (a.weak_projection ? 1 : 0) << "," << (a.zero_output ? 1 : 0) << "\n";
}

inline void write_terminal_report(std::ostream& out, const TerminalReport& report) {
    out << "id,terminal,directions\n";
    for (const auto& [id, dirs] : report.directions)
        out << id << "," << (dirs.empty() ? 0 : 1) << "," << direction_csv(dirs) << "\n";
}

inline void write_run_log(std::ostream& out, const std::vector<ImproveLogEvent>& log) {
    for (const auto& e : log)
        out << "part=" << e.part << " unit=" << e.unit << " direction=" << e.direction
            << " section=" << e.section << " epsilon=" << io_detail::format_value(e.epsilon, 9)
            << " accepted=" << (e.accepted ? "true" : "false")
            << " efficient_count=" << e.efficient_count << "\n";
}

inline void write_before_after(std::ostream& out, const ImprovementResult& r) {
    out << "id,class_before,theta_before,eta_before,weak_before,"
           "class_after,theta_after,eta_after,weak_after\n";
    for (const auto& u : r.units)
        out << u.id << "," << to_string(u.before_class) << ","
            << io_detail::format_value(u.before_theta, 9) << ","
            << io_detail::format_value(u.before_eta, 9) << "," << (u.before_weak ? 1 : 0) << ","
            << to_string(u.after_class) << "," << io_detail::format_value(u.after_theta, 9) << ","
            << io_detail::format_value(u.after_eta, 9) << "," << (u.after_weak ? 1 : 0) << "\n";
}

/// Provenance strings for the improved-dataset CSV.
inline std::map<std::string, std::string> provenance_map(const ImprovementResult& r) {
    std::map<std::string, std::string> prov;
    for (const auto& a : r.artificials) {
        if (a.status != ArtificialStatus::kept) continue;
        std::string s;
        if (a.source == ArtificialUnit::Source::terminal_smoothing) {
            std::string axes = a.section ? improve_detail::section_label(*a.section) : "";
            for (auto& ch : axes)
                if (ch == ',') ch = '+';
            s = "part1:" + a.origin_unit + ":" +
                (a.direction ? improve_detail::direction_label(*a.direction) : "-") + ":" +
                to_string(a.section ? a.section->kind : SectionKind::S1) + "(" + axes +
                "):eps=" + io_detail::format_value(a.offset, 9);
        } else {
            s = "part3:" + a.origin_unit + ":" +
                (a.orientation == Orientation::input ? "input" : "output") +
                ":alpha=" + io_detail::format_value(a.offset, 9);
        }
        prov[a.id] = s;
    }
    return prov;
}

}  // namespace dea
