#pragma once

// Dense revised-simplex kernel. Bounded variables, two-phase start, Dantzig
// pricing with a deterministic switch to Bland's rule after a stall, explicit
// basis inverse with periodic refactorization. Every model in the library is
// solved through this kernel, so determinism here makes whole runs
// reproducible.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dea/common.hpp"

namespace dea {

enum class RowSense : char { le, eq, ge };
enum class LpStatus : char { optimal, infeasible, unbounded };

struct LpOptions {
    Tolerances tol;
    long max_iterations = 50000;
    int stall_threshold = 50;  // degenerate pivots before Bland's rule engages
    int refactor_every = 64;
    std::size_t max_variables = 4096;
};

/// minimize objective . x  subject to  matrix x (senses) rhs,  lower <= x <= upper.
struct LpProblem {
    std::vector<double> objective;
    Matrix matrix;
    std::vector<double> rhs;
    std::vector<RowSense> senses;
    std::vector<double> lower;
    std::vector<double> upper;

    static LpProblem with_dims(std::size_t rows, std::size_t cols) {
        LpProblem p;
        p.objective.assign(cols, 0.0);
        p.matrix = Matrix(rows, cols);
        p.rhs.assign(rows, 0.0);
        p.senses.assign(rows, RowSense::le);
        p.lower.assign(cols, 0.0);
        p.upper.assign(cols, kInf);
        return p;
    }

    std::size_t rows() const { return matrix.rows(); }
    std::size_t cols() const { return objective.size(); }

    void validate(std::size_t max_variables = 4096) const {
        if (matrix.cols() != cols() || lower.size() != cols() || upper.size() != cols())
            throw InputError("lp: column dimensions inconsistent");
        if (rhs.size() != rows() || senses.size() != rows())
            throw InputError("lp: row dimensions inconsistent");
        if (cols() == 0) throw InputError("lp: no variables");
        if (cols() > max_variables) throw InputError("lp: variable count exceeds configured maximum");
        for (std::size_t j = 0; j < cols(); ++j) {
            if (lower[j] > upper[j]) throw InputError("lp: empty bound interval");
            if (std::isnan(lower[j]) || std::isnan(upper[j]) || !finite(objective[j]))
                throw InputError("lp: non-finite problem data");
        }
        for (double v : rhs)
            if (!finite(v)) throw InputError("lp: non-finite rhs");
        for (double v : matrix.data())
            if (!finite(v)) throw InputError("lp: non-finite matrix entry");
    }
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double objective_value = 0.0;
    std::vector<double> primal;  // structural variables
    std::vector<double> dual;    // one multiplier per row
    std::vector<int> basis;      // final basic columns in augmented space; usable as warm start
    std::uint64_t basis_tag = 0;
    long iterations = 0;
};

namespace lp_detail {

enum class VarState : char { at_lower, at_upper, free_nonbasic, basic };

class Simplex {
  public:
    Simplex(const LpProblem& p, const LpOptions& opt) : p_(p), opt_(opt) {
        nv_ = p.cols();
        nr_ = p.rows();
        ncols_ = nv_ + nr_;  // structural + one slack per row (eq rows get a fixed slack)
        lower_.assign(ncols_, 0.0);
        upper_.assign(ncols_, kInf);
        cost_.assign(ncols_, 0.0);
        for (std::size_t j = 0; j < nv_; ++j) {
            lower_[j] = p.lower[j];
            upper_[j] = p.upper[j];
            cost_[j] = p.objective[j];
        }
        slack_sign_.assign(nr_, 1.0);
        for (std::size_t i = 0; i < nr_; ++i) {
            const std::size_t s = nv_ + i;
            switch (p.senses[i]) {
                case RowSense::le: break;                         // s in [0, inf)
                case RowSense::ge: slack_sign_[i] = -1.0; break;  // A x - s = b
                case RowSense::eq: upper_[s] = 0.0; break;        // s fixed at 0
            }
        }
        rhs_scale_ = 0.0;
        for (double b : p.rhs) rhs_scale_ = std::max(rhs_scale_, std::abs(b));
        feas_abs_ = opt.tol.feas_abs(rhs_scale_);
        double cscale = 0.0;
        for (double c : cost_) cscale = std::max(cscale, std::abs(c));
        opt_abs_ = opt.tol.opt * (1.0 + cscale);
    }

    LpSolution solve(const std::vector<int>* warm) {
        LpSolution out;
        if (!(warm && try_warm_start(*warm))) cold_start();

        if (!artificials_.empty()) {
            if (!iterate(/*phase1=*/true))
                throw NumericalError("lp: iteration limit exceeded in phase 1", iterations_);
            const double infeas = phase_objective(true);
            if (infeas > feas_abs_ * 10.0) {
                out.status = LpStatus::infeasible;
                out.iterations = iterations_;
                return out;
            }
            // pin artificial columns at zero for phase 2
            for (std::size_t idx = 0; idx < artificials_.size(); ++idx) {
                lower_[ncols_ + idx] = 0.0;
                upper_[ncols_ + idx] = 0.0;
            }
        }

        if (!iterate(/*phase1=*/false))
            throw NumericalError("lp: iteration limit exceeded", iterations_);
        if (unbounded_) {
            out.status = LpStatus::unbounded;
            out.iterations = iterations_;
            return out;
        }

        refactor();  // clean values before reporting
        out.status = LpStatus::optimal;
        out.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(nv_));
        out.objective_value = 0.0;
        for (std::size_t j = 0; j < nv_; ++j) out.objective_value += p_.objective[j] * x_[j];
        out.dual = row_duals();
        out.basis.assign(basis_.begin(), basis_.end());
        std::vector<int> sorted = out.basis;
        std::sort(sorted.begin(), sorted.end());
        out.basis_tag = fnv1a(sorted.data(), sorted.size() * sizeof(int));
        out.iterations = iterations_;
        verify_primal();
        return out;
    }

  private:
    const LpProblem& p_;
    const LpOptions& opt_;
    std::size_t nv_ = 0, nr_ = 0, ncols_ = 0;
    std::vector<double> lower_, upper_, cost_;
    std::vector<double> slack_sign_;
    std::vector<std::size_t> artificials_;  // artificial column ids (appended past ncols_)
    std::vector<double> art_sign_;

    std::vector<double> x_;          // values of all columns (augmented)
    std::vector<VarState> state_;    // per augmented column
    std::vector<int> basis_;         // basic column per row
    std::vector<double> binv_;       // row-major nr x nr
    double rhs_scale_ = 0.0, feas_abs_ = 0.0, opt_abs_ = 0.0;
    long iterations_ = 0;
    int stall_ = 0;
    int tiny_pivots_ = 0;
    bool bland_ = false;
    bool unbounded_ = false;
    int pivots_since_refactor_ = 0;

    std::size_t total_cols() const { return ncols_ + artificials_.size(); }

    double col_entry(std::size_t col, std::size_t row) const {
        if (col < nv_) return p_.matrix(row, col);
        if (col < ncols_) return col - nv_ == row ? slack_sign_[col - nv_] : 0.0;
        return artificials_[col - ncols_] == row ? art_sign_[col - ncols_] : 0.0;
    }

    // w = B^-1 a_col
    void ftran(std::size_t col, std::vector<double>& w) const {
        w.assign(nr_, 0.0);
        if (col < nv_) {
            for (std::size_t i = 0; i < nr_; ++i) {
                double acc = 0.0;
                const double* bi = binv_.data() + i * nr_;
                for (std::size_t k = 0; k < nr_; ++k) {
                    const double a = p_.matrix(k, col);
                    if (a != 0.0) acc += bi[k] * a;
                }
                w[i] = acc;
            }
        } else if (col < ncols_) {
            const std::size_t row = col - nv_;
            const double s = slack_sign_[row];
            for (std::size_t i = 0; i < nr_; ++i) w[i] = binv_[i * nr_ + row] * s;
        } else {
            const std::size_t row = artificials_[col - ncols_];
            const double s = art_sign_[col - ncols_];
            for (std::size_t i = 0; i < nr_; ++i) w[i] = binv_[i * nr_ + row] * s;
        }
    }

    std::vector<double> btran(const std::vector<double>& cb) const {
        std::vector<double> y(nr_, 0.0);
        for (std::size_t k = 0; k < nr_; ++k) {
            const double c = cb[k];
            if (c == 0.0) continue;
            const double* bk = binv_.data() + k * nr_;
            for (std::size_t i = 0; i < nr_; ++i) y[i] += c * bk[i];
        }
        return y;
    }

    double phase_cost(std::size_t col, bool phase1) const {
        if (phase1) return col >= ncols_ ? 1.0 : 0.0;
        return col < nv_ ? cost_[col] : 0.0;
    }

    double phase_objective(bool phase1) const {
        double z = 0.0;
        for (std::size_t j = 0; j < total_cols(); ++j) z += phase_cost(j, phase1) * x_[j];
        return z;
    }

    void set_rest_position(std::size_t j) {
        if (finite(lower_[j])) {
            x_[j] = lower_[j];
            state_[j] = VarState::at_lower;
        } else if (finite(upper_[j])) {
            x_[j] = upper_[j];
            state_[j] = VarState::at_upper;
        } else {
            x_[j] = 0.0;
            state_[j] = VarState::free_nonbasic;
        }
    }

    void cold_start() {
        artificials_.clear();
        art_sign_.clear();
        x_.assign(ncols_, 0.0);
        state_.assign(ncols_, VarState::at_lower);
        for (std::size_t j = 0; j < ncols_; ++j) set_rest_position(j);

        // residual with every column at its rest position
        std::vector<double> resid(p_.rhs);
        for (std::size_t j = 0; j < ncols_; ++j) {
            if (x_[j] == 0.0) continue;
            for (std::size_t i = 0; i < nr_; ++i) {
                const double a = col_entry(j, i);
                if (a != 0.0) resid[i] -= a * x_[j];
            }
        }
        basis_.assign(nr_, -1);
        for (std::size_t i = 0; i < nr_; ++i) {
            const std::size_t s = nv_ + i;
            const double val = x_[s] + resid[i] / slack_sign_[i];
            if (val >= lower_[s] - feas_abs_ && val <= upper_[s] + feas_abs_) {
                basis_[i] = static_cast<int>(s);
                x_[s] = val;
                state_[s] = VarState::basic;
            } else {
                artificials_.push_back(i);
                art_sign_.push_back(resid[i] >= 0.0 ? 1.0 : -1.0);
                const std::size_t a = ncols_ + artificials_.size() - 1;
                x_.push_back(std::abs(resid[i]));
                lower_.push_back(0.0);
                upper_.push_back(kInf);
                state_.push_back(VarState::basic);
                basis_[i] = static_cast<int>(a);
            }
        }
        refactor();
    }

    bool try_warm_start(const std::vector<int>& warm) {
        if (warm.size() != nr_) return false;
        std::vector<char> used(ncols_, 0);
        for (int b : warm) {
            if (b < 0 || static_cast<std::size_t>(b) >= ncols_) return false;
            if (used[static_cast<std::size_t>(b)]++) return false;
        }
        artificials_.clear();
        art_sign_.clear();
        x_.assign(ncols_, 0.0);
        state_.assign(ncols_, VarState::at_lower);
        for (std::size_t j = 0; j < ncols_; ++j) set_rest_position(j);
        basis_.assign(warm.begin(), warm.end());
        if (!refactor_checked()) return false;
        recompute_basic_values();
        for (std::size_t i = 0; i < nr_; ++i) {
            const auto b = static_cast<std::size_t>(basis_[i]);
            state_[b] = VarState::basic;
            if (x_[b] < lower_[b] - feas_abs_ || x_[b] > upper_[b] + feas_abs_) return false;
        }
        return true;
    }

    void recompute_basic_values() {
        std::vector<double> resid(p_.rhs);
        for (std::size_t j = 0; j < total_cols(); ++j) {
            if (state_[j] == VarState::basic || x_[j] == 0.0) continue;
            for (std::size_t i = 0; i < nr_; ++i) {
                const double a = col_entry(j, i);
                if (a != 0.0) resid[i] -= a * x_[j];
            }
        }
        // x_B = B^-1 resid
        for (std::size_t i = 0; i < nr_; ++i) {
            double acc = 0.0;
            const double* bi = binv_.data() + i * nr_;
            for (std::size_t k = 0; k < nr_; ++k) acc += bi[k] * resid[k];
            x_[static_cast<std::size_t>(basis_[i])] = acc;
        }
    }

    bool refactor_checked() {
        // Gauss-Jordan inverse of the basis matrix with partial pivoting.
        std::vector<double> a(nr_ * nr_, 0.0);
        for (std::size_t c = 0; c < nr_; ++c)
            for (std::size_t i = 0; i < nr_; ++i)
                a[i * nr_ + c] = col_entry(static_cast<std::size_t>(basis_[c]), i);
        binv_.assign(nr_ * nr_, 0.0);
        for (std::size_t i = 0; i < nr_; ++i) binv_[i * nr_ + i] = 1.0;
        for (std::size_t col = 0; col < nr_; ++col) {
            std::size_t piv = col;
            double best = std::abs(a[col * nr_ + col]);
            for (std::size_t i = col + 1; i < nr_; ++i) {
                const double v = std::abs(a[i * nr_ + col]);
                if (v > best) { best = v; piv = i; }
            }
            if (best < 1e-12) return false;
            if (piv != col) {
                for (std::size_t j = 0; j < nr_; ++j) {
                    std::swap(a[piv * nr_ + j], a[col * nr_ + j]);
                    std::swap(binv_[piv * nr_ + j], binv_[col * nr_ + j]);
                }
            }
            const double d = a[col * nr_ + col];
            for (std::size_t j = 0; j < nr_; ++j) {
                a[col * nr_ + j] /= d;
                binv_[col * nr_ + j] /= d;
            }
            for (std::size_t i = 0; i < nr_; ++i) {
                if (i == col) continue;
                const double f = a[i * nr_ + col];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < nr_; ++j) {
                    a[i * nr_ + j] -= f * a[col * nr_ + j];
                    binv_[i * nr_ + j] -= f * binv_[col * nr_ + j];
                }
            }
        }
        pivots_since_refactor_ = 0;
        return true;
    }

    void refactor() {
        if (!refactor_checked()) throw NumericalError("lp: singular basis", iterations_);
        recompute_basic_values();
    }

    std::vector<double> row_duals() const {
        std::vector<double> cb(nr_);
        for (std::size_t i = 0; i < nr_; ++i) cb[i] = phase_cost(static_cast<std::size_t>(basis_[i]), false);
        return btran(cb);
    }

    // One simplex phase. Returns false when the iteration budget runs out.
    bool iterate(bool phase1) {
        unbounded_ = false;
        stall_ = 0;
        bland_ = false;
        std::vector<double> w;
        for (;;) {
            if (iterations_ >= opt_.max_iterations) return false;

            std::vector<double> cb(nr_);
            for (std::size_t i = 0; i < nr_; ++i)
                cb[i] = phase_cost(static_cast<std::size_t>(basis_[i]), phase1);
            const std::vector<double> y = btran(cb);

            // pricing
            std::size_t enter = total_cols();
            double best_score = 0.0;
            int enter_dir = +1;
            for (std::size_t j = 0; j < total_cols(); ++j) {
                if (state_[j] == VarState::basic) continue;
                if (lower_[j] == upper_[j]) continue;  // fixed
                double d = phase_cost(j, phase1);
                if (j < nv_) {
                    for (std::size_t i = 0; i < nr_; ++i) {
                        const double a = p_.matrix(i, j);
                        if (a != 0.0) d -= y[i] * a;
                    }
                } else if (j < ncols_) {
                    d -= y[j - nv_] * slack_sign_[j - nv_];
                } else {
                    d -= y[artificials_[j - ncols_]] * art_sign_[j - ncols_];
                }
                int dir = 0;
                if (state_[j] == VarState::at_lower && d < -opt_abs_) dir = +1;
                else if (state_[j] == VarState::at_upper && d > opt_abs_) dir = -1;
                else if (state_[j] == VarState::free_nonbasic && std::abs(d) > opt_abs_)
                    dir = d < 0.0 ? +1 : -1;
                if (dir == 0) continue;
                if (bland_) { enter = j; enter_dir = dir; break; }
                const double score = std::abs(d);
                if (score > best_score + 1e-15 || enter == total_cols()) {
                    best_score = score;
                    enter = j;
                    enter_dir = dir;
                }
            }
            if (enter == total_cols()) return true;  // optimal for this phase

            ftran(enter, w);

            // ratio test
            const double span = upper_[enter] - lower_[enter];
            double t = finite(span) ? span : kInf;
            std::ptrdiff_t leave = -1;  // -1: bound flip
            int leave_to = 0;           // -1 leaves to lower, +1 leaves to upper
            for (std::size_t i = 0; i < nr_; ++i) {
                const double d = enter_dir * w[i];
                const auto b = static_cast<std::size_t>(basis_[i]);
                if (d > 1e-9) {
                    if (!finite(lower_[b])) continue;
                    const double ti = (x_[b] - lower_[b]) / d;
                    if (ti < t - 1e-12 ||
                        (ti < t + 1e-12 && (leave < 0 || basis_[i] < basis_[leave]))) {
                        t = std::max(ti, 0.0);
                        leave = static_cast<std::ptrdiff_t>(i);
                        leave_to = -1;
                    }
                } else if (d < -1e-9) {
                    if (!finite(upper_[b])) continue;
                    const double ti = (x_[b] - upper_[b]) / d;
                    if (ti < t - 1e-12 ||
                        (ti < t + 1e-12 && (leave < 0 || basis_[i] < basis_[leave]))) {
                        t = std::max(ti, 0.0);
                        leave = static_cast<std::ptrdiff_t>(i);
                        leave_to = +1;
                    }
                }
            }
            if (!finite(t)) {
                if (phase1) throw NumericalError("lp: phase 1 unbounded", iterations_);
                unbounded_ = true;
                return true;
            }

            if (leave >= 0 && std::abs(w[static_cast<std::size_t>(leave)]) < 1e-10) {
                // numerically unusable pivot: rebuild the inverse and re-price
                if (++tiny_pivots_ > 5)
                    throw NumericalError("lp: persistent tiny pivots", iterations_);
                refactor();
                continue;
            }
            tiny_pivots_ = 0;

            ++iterations_;
            const bool degenerate = t <= 1e-10 * (1.0 + std::abs(x_[enter]));
            if (degenerate) {
                if (++stall_ >= opt_.stall_threshold) bland_ = true;
            } else {
                stall_ = 0;
                bland_ = false;
            }

            // apply step
            x_[enter] += enter_dir * t;
            for (std::size_t i = 0; i < nr_; ++i) {
                const auto b = static_cast<std::size_t>(basis_[i]);
                x_[b] -= t * enter_dir * w[i];
            }
            if (leave < 0) {
                // bound flip: entering jumps to its other bound, basis unchanged
                state_[enter] =
                    enter_dir > 0 ? VarState::at_upper : VarState::at_lower;
                x_[enter] = enter_dir > 0 ? upper_[enter] : lower_[enter];
                continue;
            }

            const auto li = static_cast<std::size_t>(leave);
            const auto lv = static_cast<std::size_t>(basis_[li]);
            const double piv = w[li];
            state_[lv] = leave_to < 0 ? VarState::at_lower : VarState::at_upper;
            x_[lv] = leave_to < 0 ? lower_[lv] : upper_[lv];
            state_[enter] = VarState::basic;
            basis_[li] = static_cast<int>(enter);

            // elementary update of B^-1
            double* prow = binv_.data() + li * nr_;
            for (std::size_t k = 0; k < nr_; ++k) prow[k] /= piv;
            for (std::size_t i = 0; i < nr_; ++i) {
                if (i == li) continue;
                const double f = w[i];
                if (f == 0.0) continue;
                double* row = binv_.data() + i * nr_;
                for (std::size_t k = 0; k < nr_; ++k) row[k] -= f * prow[k];
            }
            if (++pivots_since_refactor_ >= opt_.refactor_every) refactor();
        }
    }

    void verify_primal() const {
        for (std::size_t i = 0; i < nr_; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < nv_; ++j) ax += p_.matrix(i, j) * x_[j];
            const double b = p_.rhs[i];
            double viol = 0.0;
            switch (p_.senses[i]) {
                case RowSense::le: viol = std::max(0.0, ax - b); break;
                case RowSense::ge: viol = std::max(0.0, b - ax); break;
                case RowSense::eq: viol = std::abs(ax - b); break;
            }
            if (viol > feas_abs_ * 100.0)
                throw NumericalError("lp: optimal point fails feasibility verification",
                                     iterations_);
        }
    }
};

}  // namespace lp_detail

/// Solves a single LP. `warm_basis` may carry the basis of a previous solution
/// of a structurally identical problem; an unusable basis falls back to a cold
/// start, and results match the cold path within tolerances either way.
inline LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {},
                           const std::vector<int>* warm_basis = nullptr) {
    problem.validate(options.max_variables);
    lp_detail::Simplex s(problem, options);
    return s.solve(warm_basis);
}

struct LexicographicSolution {
    LpSolution stage1;
    std::optional<LpSolution> stage2;  // empty when stage 1 did not reach an optimum
};

/// Two-stage lexicographic solve: optimizes stage1, then optimizes
/// `stage2_objective` over the stage-1 optimal face. The stage-1 value is
/// pinned by a pair of inequality rows forming an equality with tolerance
/// band +-opt_tol.
inline LexicographicSolution solve_lexicographic(const LpProblem& stage1,
                                                 const std::vector<double>& stage2_objective,
                                                 const LpOptions& options = {}) {
    if (stage2_objective.size() != stage1.cols())
        throw InputError("lexicographic: stage-2 objective dimension mismatch");
    LexicographicSolution out;
    out.stage1 = solve_lp(stage1, options);
    if (out.stage1.status != LpStatus::optimal) return out;

    const double z1 = out.stage1.objective_value;
    const double band = options.tol.opt * (1.0 + std::abs(z1));
    LpProblem p2 = stage1;
    p2.objective = stage2_objective;
    const std::size_t nr = stage1.rows();
    Matrix m2(nr + 2, stage1.cols());
    std::copy(stage1.matrix.data().begin(), stage1.matrix.data().end(), m2.data().begin());
    for (std::size_t j = 0; j < stage1.cols(); ++j) {
        m2(nr, j) = stage1.objective[j];
        m2(nr + 1, j) = stage1.objective[j];
    }
    p2.matrix = std::move(m2);
    p2.rhs.push_back(z1 + band);
    p2.senses.push_back(RowSense::le);
    p2.rhs.push_back(z1 - band);
    p2.senses.push_back(RowSense::ge);

    // stage-1 basis plus the two fresh slack columns is a valid warm basis
    std::vector<int> warm = out.stage1.basis;
    warm.push_back(static_cast<int>(stage1.cols() + nr));
    warm.push_back(static_cast<int>(stage1.cols() + nr + 1));
    LpSolution s2 = solve_lp(p2, options, &warm);
    if (s2.status == LpStatus::optimal) s2.dual.resize(nr);
    out.stage2 = std::move(s2);
    return out;
}

/// Dual objective of a solved problem, including bound contributions; used to
/// check the duality gap of optimal solutions.
inline double dual_objective(const LpProblem& p, const LpSolution& s) {
    double v = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) v += s.dual[i] * p.rhs[i];
    for (std::size_t j = 0; j < p.cols(); ++j) {
        double d = p.objective[j];
        for (std::size_t i = 0; i < p.rows(); ++i) d -= s.dual[i] * p.matrix(i, j);
        if (d > 0.0 && finite(p.lower[j]))
            v += d * p.lower[j];
        else if (d < 0.0 && finite(p.upper[j]))
            v += d * p.upper[j];
    }
    return v;
}

}  // namespace dea
