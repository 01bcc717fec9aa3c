#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dea/common.hpp"

namespace dea {

/// One input/output bundle in production space.
struct Point {
    std::vector<double> x;  // inputs, size m
    std::vector<double> y;  // outputs, size r

    Point() = default;
    Point(std::vector<double> inputs, std::vector<double> outputs)
        : x(std::move(inputs)), y(std::move(outputs)) {}
};

/// A set of production units: n rows of (inputs, outputs) plus per-unit
/// origin flags distinguishing observed units from inserted artificial ones.
struct Dataset {
    std::vector<std::string> ids;  // unique, size n
    Matrix inputs;                 // n x m, entries >= 0
    Matrix outputs;                // n x r, entries >= 0
    std::vector<bool> artificial;  // size n

    std::size_t units() const { return ids.size(); }
    std::size_t num_inputs() const { return inputs.cols(); }
    std::size_t num_outputs() const { return outputs.cols(); }

    Point point(std::size_t j) const {
        Point p;
        p.x.assign(inputs.row(j), inputs.row(j) + inputs.cols());
        p.y.assign(outputs.row(j), outputs.row(j) + outputs.cols());
        return p;
    }

    std::size_t index_of(const std::string& id) const {
        for (std::size_t j = 0; j < ids.size(); ++j)
            if (ids[j] == id) return j;
        throw InputError("unknown unit id: " + id);
    }

    void add_unit(std::string id, const Point& p, bool is_artificial) {
        if (p.x.size() != num_inputs() || p.y.size() != num_outputs())
            throw InputError("unit dimensions do not match dataset");
        Matrix in(units() + 1, num_inputs());
        Matrix out(units() + 1, num_outputs());
        std::copy(inputs.data().begin(), inputs.data().end(), in.data().begin());
        std::copy(outputs.data().begin(), outputs.data().end(), out.data().begin());
        for (std::size_t k = 0; k < p.x.size(); ++k) in(units(), k) = p.x[k];
        for (std::size_t i = 0; i < p.y.size(); ++i) out(units(), i) = p.y[i];
        inputs = std::move(in);
        outputs = std::move(out);
        ids.push_back(std::move(id));
        artificial.push_back(is_artificial);
    }

    void remove_unit(std::size_t j) {
        Matrix in(units() - 1, num_inputs());
        Matrix out(units() - 1, num_outputs());
        for (std::size_t row = 0, dst = 0; row < units(); ++row) {
            if (row == j) continue;
            for (std::size_t k = 0; k < num_inputs(); ++k) in(dst, k) = inputs(row, k);
            for (std::size_t i = 0; i < num_outputs(); ++i) out(dst, i) = outputs(row, i);
            ++dst;
        }
        inputs = std::move(in);
        outputs = std::move(out);
        ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(j));
        artificial.erase(artificial.begin() + static_cast<std::ptrdiff_t>(j));
    }

    /// Validates the dataset invariants; throws InputError naming the problem.
    void validate() const {
        const std::size_t n = units(), m = num_inputs(), r = num_outputs();
        if (n < 1 || m < 1 || r < 1) throw InputError("dataset must have n >= 1, m >= 1, r >= 1");
        if (inputs.rows() != n || outputs.rows() != n || artificial.size() != n)
            throw InputError("dataset row counts are inconsistent");
        std::unordered_set<std::string> seen;
        for (const auto& id : ids)
            if (!seen.insert(id).second) throw InputError("duplicate unit id: " + id);
        auto check_cell = [](double v, const std::string& where) {
            if (!finite(v)) throw InputError("non-finite value in " + where);
            if (v < 0.0) throw InputError("negative value in " + where);
        };
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < m; ++k) check_cell(inputs(j, k), "input column x" + std::to_string(k + 1));
            for (std::size_t i = 0; i < r; ++i) check_cell(outputs(j, i), "output column y" + std::to_string(i + 1));
        }
        auto dead = [n](const Matrix& mat, std::size_t col) {
            for (std::size_t j = 0; j < n; ++j)
                if (mat(j, col) > 0.0) return false;
            return true;
        };
        for (std::size_t k = 0; k < m; ++k)
            if (dead(inputs, k)) throw InputError("dead column x" + std::to_string(k + 1) + ": no positive entry");
        for (std::size_t i = 0; i < r; ++i)
            if (dead(outputs, i)) throw InputError("dead column y" + std::to_string(i + 1) + ": no positive entry");
    }
};

/// Builds a dataset from unit ids and per-unit (inputs, outputs) rows.
inline Dataset make_dataset(std::vector<std::string> ids,
                            const std::vector<std::vector<double>>& x_rows,
                            const std::vector<std::vector<double>>& y_rows) {
    Dataset d;
    const std::size_t n = ids.size();
    if (x_rows.size() != n || y_rows.size() != n) throw InputError("row count mismatch");
    if (n == 0) throw InputError("empty dataset");
    d.ids = std::move(ids);
    d.inputs = Matrix(n, x_rows[0].size());
    d.outputs = Matrix(n, y_rows[0].size());
    d.artificial.assign(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (x_rows[j].size() != d.num_inputs() || y_rows[j].size() != d.num_outputs())
            throw InputError("ragged rows in dataset");
        for (std::size_t k = 0; k < d.num_inputs(); ++k) d.inputs(j, k) = x_rows[j][k];
        for (std::size_t i = 0; i < d.num_outputs(); ++i) d.outputs(j, i) = y_rows[j][i];
    }
    d.validate();
    return d;
}

/// Per-column summary used for scale-free steps and zero tests.
struct ColumnStats {
    double min = 0.0;
    double max = 0.0;
    /// max - min, falling back to max when the column is constant. Used as the
    /// unit of measure for placement steps so defaults are scale free.
    double range_unit = 1.0;
    /// Largest magnitude in the column; drives zero thresholds.
    double scale = 0.0;
};

struct DatasetStats {
    std::vector<ColumnStats> input_cols;
    std::vector<ColumnStats> output_cols;
};

inline DatasetStats column_stats(const Dataset& d) {
    auto column = [&](const Matrix& mat, std::size_t c) {
        ColumnStats s;
        s.min = kInf;
        s.max = -kInf;
        for (std::size_t j = 0; j < mat.rows(); ++j) {
            s.min = std::min(s.min, mat(j, c));
            s.max = std::max(s.max, mat(j, c));
        }
        s.scale = std::max(std::abs(s.min), std::abs(s.max));
        s.range_unit = s.max - s.min;
        if (s.range_unit <= 0.0) s.range_unit = s.max > 0.0 ? s.max : 1.0;
        return s;
    };
    DatasetStats stats;
    for (std::size_t k = 0; k < d.num_inputs(); ++k) stats.input_cols.push_back(column(d.inputs, k));
    for (std::size_t i = 0; i < d.num_outputs(); ++i) stats.output_cols.push_back(column(d.outputs, i));
    return stats;
}

}  // namespace dea
