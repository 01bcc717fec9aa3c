#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dea {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Solver and classification tolerances shared across the library.
///
/// `feas` and `opt` are relative: they get scaled by (1 + data magnitude)
/// at the point of use. A quantity counts as zero iff |v| <= zero * (1 +
/// scale of the data column it belongs to).
struct Tolerances {
    double feas = 1e-8;
    double opt = 1e-7;
    double zero = 1e-6;

    double feas_abs(double rhs_scale) const { return feas * (1.0 + rhs_scale); }
    double zero_abs(double column_scale) const { return zero * (1.0 + column_scale); }
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatches, bad data values, bad configs.
class InputError : public Error {
  public:
    using Error::Error;
};

/// The solver gave up: iteration limit, singular basis, lost feasibility.
class NumericalError : public Error {
  public:
    NumericalError(const std::string& what, long iterations)
        : Error(what), iterations(iterations) {}
    long iterations = 0;
};

/// A point handed to an evaluation lies outside the production possibility set.
class OutsidePpsError : public Error {
  public:
    using Error::Error;
};

/// Dense row-major matrix, just enough for the LP kernel and datasets.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::uint64_t fnv1a(const void* bytes, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline bool finite(double v) { return std::isfinite(v); }

}  // namespace dea
