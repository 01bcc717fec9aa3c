#pragma once

// Synthetic dataset generator: log-normal columns calibrated to target
// mean/stddev pairs, with a correlation knob coupling outputs to inputs
// through a shared latent factor. Per column the exponential transform
// a * exp(b * w) is fitted to the realized draws, so the sample moments hit
// the targets for every seed.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dea/dataset.hpp"

namespace dea {

struct ColumnMoments {
    double mean = 1.0;
    double stddev = 1.0;
};

struct SynthSpec {
    std::size_t units = 0, inputs = 0, outputs = 0;
    std::vector<ColumnMoments> input_moments;   // size inputs
    std::vector<ColumnMoments> output_moments;  // size outputs
    double rho = 0.5;  // in [0,1): latent-factor loading between inputs and outputs
    std::uint64_t seed = 1;

    void validate() const {
        if (units < 1 || inputs < 1 || outputs < 1) throw InputError("synth: n, m, r must be >= 1");
        if (input_moments.size() != inputs || output_moments.size() != outputs)
            throw InputError("synth: moment count mismatch");
        for (const auto& mom : input_moments)
            if (!(mom.mean > 0.0) || !(mom.stddev > 0.0))
                throw InputError("synth: moments must be positive");
        for (const auto& mom : output_moments)
            if (!(mom.mean > 0.0) || !(mom.stddev > 0.0))
                throw InputError("synth: moments must be positive");
        if (!(rho >= 0.0 && rho < 1.0)) throw InputError("synth: rho must lie in [0,1)");
    }
};

/// Summary moments of a 174-bank financial panel (billions of roubles),
/// used as generator defaults. Inputs: demand liabilities, time liabilities,
/// working assets. Outputs: liquid assets, equity capital, fixed assets.
inline const std::vector<ColumnMoments>& bank_input_moments() {
    static const std::vector<ColumnMoments> m = {{15.16, 18.16}, {27.06, 37.86}, {36.49, 47.34}};
    return m;
}
inline const std::vector<ColumnMoments>& bank_output_moments() {
    static const std::vector<ColumnMoments> m = {{6.62, 9.36}, {3.52, 4.82}, {1.02, 1.32}};
    return m;
}

/// SynthSpec with moments cycled from the bank panel defaults.
inline SynthSpec calibrated_spec(std::size_t n, std::size_t m, std::size_t r,
                                 std::uint64_t seed = 1, double rho = 0.5) {
    SynthSpec s;
    s.units = n;
    s.inputs = m;
    s.outputs = r;
    s.seed = seed;
    s.rho = rho;
    for (std::size_t k = 0; k < m; ++k)
        s.input_moments.push_back(bank_input_moments()[k % bank_input_moments().size()]);
    for (std::size_t i = 0; i < r; ++i)
        s.output_moments.push_back(bank_output_moments()[i % bank_output_moments().size()]);
    return s;
}

namespace synth_detail {

// Fit a * exp(b * w) to the realized w's so the sample mean and stddev equal
// the targets. The coefficient of variation of exp(b * w) grows continuously
// in b, so b is found by bisection and a is a final rescale.
inline std::vector<double> calibrate_column(const std::vector<double>& w,
                                            const ColumnMoments& mom) {
    const std::size_t n = w.size();
    auto cv_of = [&](double b) {
        double s = 0.0, s2 = 0.0;
        for (double v : w) {
            const double e = std::exp(b * v);
            s += e;
            s2 += e * e;
        }
        const double mean = s / static_cast<double>(n);
        const double var = std::max(0.0, s2 / static_cast<double>(n) - mean * mean);
        return std::sqrt(var) / mean;
    };
    const double target_cv = mom.stddev / mom.mean;
    double lo = 1e-6, hi = 1.0;
    while (cv_of(hi) < target_cv && hi < 64.0) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cv_of(mid) < target_cv ? lo : hi) = mid;
    }
    const double b = 0.5 * (lo + hi);
    double s = 0.0;
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        col[j] = std::exp(b * w[j]);
        s += col[j];
    }
    const double a = mom.mean * static_cast<double>(n) / s;
    for (double& v : col) v *= a;
    return col;
}

}  // namespace synth_detail

/// Deterministic per seed. Sample mean and stddev of every column match the
/// spec targets (exactly, by construction, for n >= 3); outputs correlate
/// positively with inputs through the shared latent factor when rho > 0.
inline Dataset generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.units;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> latent(n);
    for (double& v : latent) v = normal(rng);

    auto standardized = [&](std::vector<double> w) {
        double mean = 0.0;
        for (double v : w) mean += v;
        mean /= static_cast<double>(w.size());
        double var = 0.0;
        for (double v : w) var += (v - mean) * (v - mean);
        var /= static_cast<double>(w.size());
        const double sd = std::sqrt(std::max(var, 1e-300));
        for (double& v : w) v = (v - mean) / sd;
        return w;
    };

    auto draw_column = [&]() {
        std::vector<double> w(n);
        const double load = std::sqrt(spec.rho);
        const double noise = std::sqrt(1.0 - spec.rho);
        for (std::size_t j = 0; j < n; ++j) w[j] = load * latent[j] + noise * normal(rng);
        return n >= 3 ? standardized(std::move(w)) : w;
    };

    Dataset d;
    d.inputs = Matrix(n, spec.inputs);
    d.outputs = Matrix(n, spec.outputs);
    d.artificial.assign(n, false);
    for (std::size_t j = 0; j < n; ++j) d.ids.push_back("u" + std::to_string(j + 1));
    for (std::size_t k = 0; k < spec.inputs; ++k) {
        auto col = n >= 3 ? synth_detail::calibrate_column(draw_column(), spec.input_moments[k])
                          : draw_column();
        if (n < 3)
            for (double& v : col) v = spec.input_moments[k].mean * std::exp(v);
        for (std::size_t j = 0; j < n; ++j) d.inputs(j, k) = col[j];
    }
    for (std::size_t i = 0; i < spec.outputs; ++i) {
        auto col = n >= 3 ? synth_detail::calibrate_column(draw_column(), spec.output_moments[i])
                          : draw_column();
        if (n < 3)
            for (double& v : col) v = spec.output_moments[i].mean * std::exp(v);
        for (std::size_t j = 0; j < n; ++j) d.outputs(j, i) = col[j];
    }
    d.validate();
    return d;
}

}  // namespace dea
