#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dea/io.hpp"
#include "dea/synth.hpp"
#include "desk.hpp"

using namespace dea;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("dea_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("csv loading") {
    TempDir tmp;
    SECTION("desk dataset parses with dimensions intact") {
        write_file(tmp.file("d3.csv"), "id,x1,x2,y1\nE,1,4,1\nD,2,2,1\nC,4,1,1\n");
        const auto d = load_csv(tmp.file("d3.csv"));
        REQUIRE(d.units() == 3);
        REQUIRE(d.num_inputs() == 2);
        REQUIRE(d.num_outputs() == 1);
        REQUIRE(d.ids == std::vector<std::string>{"E", "D", "C"});
        REQUIRE_THAT(d.inputs(0, 1), WithinAbs(4.0, 0.0));
    }
    SECTION("negative value names the cell") {
        write_file(tmp.file("neg.csv"), "id,x1,y1\na,1,1\nb,-2,1\n");
        REQUIRE_THROWS_WITH(load_csv(tmp.file("neg.csv")),
                            Catch::Matchers::ContainsSubstring("row 3") &&
                                Catch::Matchers::ContainsSubstring("x1"));
    }
    SECTION("duplicate ids are rejected") {
        write_file(tmp.file("dup.csv"), "id,x1,y1\na,1,1\na,2,1\n");
        REQUIRE_THROWS_AS(load_csv(tmp.file("dup.csv")), LoadError);
    }
    SECTION("missing cells are rejected") {
        write_file(tmp.file("gap.csv"), "id,x1,y1\na,1,1\nb,,1\n");
        REQUIRE_THROWS_AS(load_csv(tmp.file("gap.csv")), LoadError);
    }
    SECTION("dead columns are rejected at load") {
        write_file(tmp.file("dead.csv"), "id,x1,x2,y1\na,1,0,1\nb,2,0,1\n");
        REQUIRE_THROWS_WITH(load_csv(tmp.file("dead.csv")),
                            Catch::Matchers::ContainsSubstring("x2"));
    }
    SECTION("unknown header column is rejected") {
        write_file(tmp.file("bad.csv"), "id,x1,z9,y1\na,1,1,1\n");
        REQUIRE_THROWS_AS(load_csv(tmp.file("bad.csv")), LoadError);
    }
    SECTION("artificial flag column round-trips") {
        write_file(tmp.file("art.csv"), "id,x1,y1,artificial\na,1,1,0\nb,0.9,1,1\n");
        const auto d = load_csv(tmp.file("art.csv"));
        REQUIRE_FALSE(d.artificial[0]);
        REQUIRE(d.artificial[1]);
    }
}

TEST_CASE("csv write/load round-trip is stable at 12 significant digits") {
    TempDir tmp;
    auto d = desk::d3();
    d.inputs(0, 0) = 1.0 / 3.0;
    d.inputs(1, 1) = 2.0 / 7.0;
    d.outputs(2, 0) = 0.123456789012345;
    save_csv(d, tmp.file("a.csv"));
    const auto back = load_csv(tmp.file("a.csv"));
    save_csv(back, tmp.file("b.csv"));
    REQUIRE(read_file(tmp.file("a.csv")) == read_file(tmp.file("b.csv")));
    for (std::size_t j = 0; j < d.units(); ++j)
        for (std::size_t k = 0; k < d.num_inputs(); ++k)
            REQUIRE_THAT(back.inputs(j, k),
                         WithinAbs(d.inputs(j, k), 1e-11 * (1.0 + d.inputs(j, k))));
}

TEST_CASE("config parsing") {
    TempDir tmp;
    SECTION("known keys are applied") {
        write_file(tmp.file("c.cfg"),
                   "# improvement knobs\nalong_step = 0.4\nexterior_offset = 0.2\n"
                   "shrink_factor = 0.5\nmax_halvings = 9\nseed = 7\n");
        RunConfig cfg;
        cfg.apply(load_config(tmp.file("c.cfg")));
        REQUIRE_THAT(cfg.improve.along_step, WithinAbs(0.4, 0.0));
        REQUIRE(cfg.improve.max_halvings == 9);
        REQUIRE(cfg.seed == 7);
    }
    SECTION("unknown keys are rejected") {
        write_file(tmp.file("u.cfg"), "no_such_knob = 1\n");
        RunConfig cfg;
        REQUIRE_THROWS_AS(cfg.apply(load_config(tmp.file("u.cfg"))), LoadError);
    }
    SECTION("malformed lines are rejected") {
        write_file(tmp.file("m.cfg"), "along_step 0.4\n");
        REQUIRE_THROWS_AS(load_config(tmp.file("m.cfg")), LoadError);
    }
}

TEST_CASE("polyline export format") {
    const auto d3 = desk::d3();
    SectionSpec spec{desk::pt({2, 2}, {1}), SectionKind::S1, 0, 1};
    const auto pl = section_polyline(d3, spec, 64);
    std::ostringstream out;
    write_polyline(out, pl, spec, "D");
    const std::string text = out.str();
    REQUIRE(text.find("# section kind=S1 base=D axes=1,2\n") == 0);
    REQUIRE(text.find("1\t4\n") != std::string::npos);
    REQUIRE(text.find("2\t2\n") != std::string::npos);
    REQUIRE(text.find("4\t1\n") != std::string::npos);
    REQUIRE(text.find("# ray left\n") != std::string::npos);
    REQUIRE(text.find("# ray right\n") != std::string::npos);
}

TEST_CASE("report counts respect the efficiency inclusion chain") {
    auto d = desk::d3_with_g_h();
    d.add_unit("Q", desk::pt({4, 4}, {0.5}), false);
    const auto all = assess_all(d);
    const auto counts = count_classes(all);
    REQUIRE(counts.extreme == 3);
    REQUIRE(counts.weakly == 2);  // G and H (theta* or eta* is one with slack)
    REQUIRE(counts.inefficient == 1);
    std::size_t score_one = 0;
    for (const auto& a : all)
        if (std::abs(a.input.score - 1.0) <= 2e-6 || std::abs(a.output.score - 1.0) <= 2e-6)
            ++score_one;
    REQUIRE(counts.extreme <= counts.efficient());
    REQUIRE(counts.efficient() <= score_one);
}

TEST_CASE("synthetic generator hits the calibrated moments") {
    const auto spec = calibrated_spec(174, 3, 3, 1);
    const auto d = generate_synthetic(spec);
    REQUIRE(d.units() == 174);
    for (std::size_t k = 0; k < 3; ++k) {
        double mean = 0.0;
        for (std::size_t j = 0; j < d.units(); ++j) mean += d.inputs(j, k);
        mean /= static_cast<double>(d.units());
        const double target = spec.input_moments[k].mean;
        REQUIRE(std::abs(mean - target) <= 0.15 * target);
        double var = 0.0;
        for (std::size_t j = 0; j < d.units(); ++j)
            var += (d.inputs(j, k) - mean) * (d.inputs(j, k) - mean);
        const double sd = std::sqrt(var / static_cast<double>(d.units()));
        REQUIRE(std::abs(sd - spec.input_moments[k].stddev) <= 0.15 * spec.input_moments[k].stddev);
    }
    // headline column of the calibration target
    double x3 = 0.0;
    for (std::size_t j = 0; j < d.units(); ++j) x3 += d.inputs(j, 2);
    x3 /= static_cast<double>(d.units());
    REQUIRE(std::abs(x3 - 36.49) <= 0.15 * 36.49);
}

TEST_CASE("synthetic generator is deterministic per seed") {
    const auto a = generate_synthetic(calibrated_spec(60, 3, 3, 42));
    const auto b = generate_synthetic(calibrated_spec(60, 3, 3, 42));
    REQUIRE(a.inputs.data() == b.inputs.data());
    REQUIRE(a.outputs.data() == b.outputs.data());
    const auto c = generate_synthetic(calibrated_spec(60, 3, 3, 43));
    REQUIRE(a.inputs.data() != c.inputs.data());
}

TEST_CASE("correlation knob at zero leaves inputs and outputs uncoupled") {
    auto spec = calibrated_spec(1000, 1, 1, 5);
    spec.rho = 0.0;
    const auto d = generate_synthetic(spec);
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(d.units());
    for (std::size_t j = 0; j < d.units(); ++j) {
        mx += d.inputs(j, 0);
        my += d.outputs(j, 0);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t j = 0; j < d.units(); ++j) {
        const double dx = d.inputs(j, 0) - mx, dy = d.outputs(j, 0) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    REQUIRE(std::abs(corr) <= 0.2);
}

TEST_CASE("correlation knob couples outputs to inputs") {
    auto spec = calibrated_spec(1000, 1, 1, 5);
    spec.rho = 0.8;
    const auto d = generate_synthetic(spec);
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(d.units());
    for (std::size_t j = 0; j < d.units(); ++j) {
        mx += d.inputs(j, 0);
        my += d.outputs(j, 0);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t j = 0; j < d.units(); ++j) {
        const double dx = d.inputs(j, 0) - mx, dy = d.outputs(j, 0) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    REQUIRE(sxy / std::sqrt(sxx * syy) > 0.4);
}

TEST_CASE("synth spec validation") {
    auto spec = calibrated_spec(10, 3, 3, 1);
    spec.rho = 1.0;
    REQUIRE_THROWS_AS(generate_synthetic(spec), InputError);
    spec = calibrated_spec(10, 3, 3, 1);
    spec.input_moments[0].mean = -1.0;
    REQUIRE_THROWS_AS(generate_synthetic(spec), InputError);
}

TEST_CASE("run log format") {
    std::vector<ImproveLogEvent> log;
    log.push_back({1, "E", "in:2", "2,1", 0.25, true, 3});
    log.push_back({3, "G", "-", "-", 0.9, false, 2});
    std::ostringstream out;
    write_run_log(out, log);
    REQUIRE(out.str() ==
            "part=1 unit=E direction=in:2 section=2,1 epsilon=0.25 accepted=true "
            "efficient_count=3\n"
            "part=3 unit=G direction=- section=- epsilon=0.9 accepted=false "
            "efficient_count=2\n");
}
