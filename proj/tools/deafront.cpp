// Command-line front end: efficiency tables, classification, terminal units,
// frontier sections, frontier improvement and synthetic data generation.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 convergence failure
// (partial outputs are still written).

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dea/dea.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitConvergence = 3;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw dea::LoadError("cannot write " + path);
    return out;
}

void emit(const std::string& out_path, const std::function<void(std::ostream&)>& writer) {
    if (out_path.empty()) {
        writer(std::cout);
    } else {
        auto out = open_out(out_path);
        writer(out);
    }
}

int run_eff(const std::string& input, const std::string& orientation, const std::string& out) {
    const auto d = dea::load_csv(input);
    const auto all = dea::assess_all(d);
    const auto o = orientation == "output" ? dea::Orientation::output : dea::Orientation::input;
    emit(out, [&](std::ostream& s) { dea::write_efficiency_report(s, d, all, o); });
    return kExitOk;
}

int run_classify(const std::string& input, const std::string& out) {
    const auto d = dea::load_csv(input);
    const auto all = dea::assess_all(d);
    emit(out, [&](std::ostream& s) { dea::write_classify_report(s, all); });
    const auto counts = dea::count_classes(all);
    std::cerr << "extreme-efficient: " << counts.extreme
              << "\nefficient-nonextreme: " << counts.nonextreme
              << "\nweakly-efficient: " << counts.weakly
              << "\ninefficient: " << counts.inefficient
              << "\nweak projections: " << counts.weak_projections << "\n";
    return kExitOk;
}

int run_terminal(const std::string& input, const std::string& out) {
    const auto d = dea::load_csv(input);
    const auto report = dea::find_terminal_units(d);
    emit(out, [&](std::ostream& s) { dea::write_terminal_report(s, report); });
    return kExitOk;
}

int run_section(const std::string& input, const std::string& base, const std::string& kind,
                const std::string& axes, long samples, bool with_units, const std::string& out) {
    const auto d = dea::load_csv(input);
    dea::SectionSpec spec;
    spec.base = d.point(d.index_of(base));
    spec.kind = kind == "S2"   ? dea::SectionKind::S2
                : kind == "S3" ? dea::SectionKind::S3
                               : dea::SectionKind::S1;
    const auto comma = axes.find(',');
    if (comma == std::string::npos) throw dea::InputError("--axes expects 'a,b'");
    spec.first_axis = static_cast<std::size_t>(std::stoul(axes.substr(0, comma))) - 1;
    spec.second_axis = static_cast<std::size_t>(std::stoul(axes.substr(comma + 1))) - 1;
    const auto pl = dea::section_polyline(d, spec, samples);

    std::vector<std::pair<std::string, std::pair<double, double>>> annex;
    if (with_units) {
        for (std::size_t j = 0; j < d.units(); ++j) {
            const auto p = d.point(j);
            const double a = spec.kind == dea::SectionKind::S2 ? p.y[spec.first_axis]
                                                               : p.x[spec.first_axis];
            const double b = spec.kind == dea::SectionKind::S1 ? p.x[spec.second_axis]
                                                               : p.y[spec.second_axis];
            annex.emplace_back(d.ids[j], std::make_pair(a, b));
        }
    }
    emit(out, [&](std::ostream& s) {
        dea::write_polyline(s, pl, spec, base, with_units ? &annex : nullptr);
    });
    return kExitOk;
}

void write_improve_outputs(const std::string& out_dir, const dea::ImprovementResult& r) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto prov = dea::provenance_map(r);
    dea::save_csv(r.improved, (fs::path(out_dir) / "improved.csv").string(), &prov);
    {
        auto log = open_out((fs::path(out_dir) / "run_log.txt").string());
        dea::write_run_log(log, r.log);
    }
    {
        auto rep = open_out((fs::path(out_dir) / "report.csv").string());
        dea::write_before_after(rep, r);
    }
}

int run_improve(const std::string& input, const std::string& config, const std::string& out_dir) {
    const auto d = dea::load_csv(input);
    dea::RunConfig cfg;
    if (!config.empty()) cfg.apply(dea::load_config(config));
    try {
        const auto r = dea::improve_frontier(d, cfg.improve);
        write_improve_outputs(out_dir, r);
        std::size_t kept = 0;
        for (const auto& a : r.artificials)
            if (a.status == dea::ArtificialStatus::kept) ++kept;
        std::cerr << "artificial units kept: " << kept << "\n";
        return kExitOk;
    } catch (const dea::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << "\n";
        if (e.partial_result) write_improve_outputs(out_dir, *e.partial_result);
        return kExitConvergence;
    }
}

int run_synth(std::size_t n, std::size_t m, std::size_t r, std::uint64_t seed, double rho,
              const std::string& out) {
    auto spec = dea::calibrated_spec(n, m, r, seed, rho);
    const auto d = dea::generate_synthetic(spec);
    dea::save_csv(d, out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BCC efficiency analysis and frontier improvement"};
    app.require_subcommand(1);

    std::string input, out, out_dir, config;
    std::string orientation = "input", base, kind = "S1", axes = "1,2";
    long samples = 64;
    bool with_units = false;
    std::size_t n_units = 100, n_inputs = 3, n_outputs = 3;
    std::uint64_t seed = 1;
    double rho = 0.5;

    auto* eff = app.add_subcommand("eff", "per-unit efficiency scores and slacks");
    eff->add_option("--input", input)->required();
    eff->add_option("--orientation", orientation)->check(CLI::IsMember({"input", "output"}));
    eff->add_option("--out", out);

    auto* cls = app.add_subcommand("classify", "unit classification table");
    cls->add_option("--input", input)->required();
    cls->add_option("--out", out);

    auto* term = app.add_subcommand("terminal", "terminal units and directions");
    term->add_option("--input", input)->required();
    term->add_option("--out", out);

    auto* sec = app.add_subcommand("section", "frontier section polyline");
    sec->add_option("--input", input)->required();
    sec->add_option("--base", base)->required();
    sec->add_option("--kind", kind)->check(CLI::IsMember({"S1", "S2", "S3"}));
    sec->add_option("--axes", axes);
    sec->add_option("--samples", samples);
    sec->add_flag("--with-units", with_units, "append unit projections as an annex");
    sec->add_option("--out", out);

    auto* imp = app.add_subcommand("improve", "run the frontier improvement");
    imp->add_option("--input", input)->required();
    imp->add_option("--config", config);
    imp->add_option("--out-dir", out_dir)->required();

    auto* syn = app.add_subcommand("synth", "generate a calibrated synthetic dataset");
    syn->add_option("--units", n_units)->required();
    syn->add_option("--inputs", n_inputs)->required();
    syn->add_option("--outputs", n_outputs)->required();
    syn->add_option("--seed", seed);
    syn->add_option("--rho", rho);
    syn->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (eff->parsed()) return run_eff(input, orientation, out);
        if (cls->parsed()) return run_classify(input, out);
        if (term->parsed()) return run_terminal(input, out);
        if (sec->parsed()) return run_section(input, base, kind, axes, samples, with_units, out);
        if (imp->parsed()) return run_improve(input, config, out_dir);
        if (syn->parsed()) return run_synth(n_units, n_inputs, n_outputs, seed, rho, out);
    } catch (const dea::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const dea::NumericalError& e) {
        std::cerr << "error: " << e.what() << " (iterations: " << e.iterations << ")\n";
        return kExitConvergence;
    } catch (const dea::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
