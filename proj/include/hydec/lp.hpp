#pragma once

#include <iomanip>
#include <sstream>

#include "hydec/common.hpp"

namespace hydec {

enum class RowSense { LE, EQ, GE };

/// min c'x subject to row constraints and variable bounds (+/-inf allowed).
struct LinearProgram {
    struct Row {
        std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
        RowSense sense = RowSense::LE;
        double rhs = 0.0;
    };

    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<Row> rows;
    double constant = 0.0;  // added to the reported objective

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_variable(double lo, double up, double cost) {
        if (lo > up) throw ConfigError("variable bounds crossed");
        objective.push_back(cost);
        lower.push_back(lo);
        upper.push_back(up);
        return num_vars() - 1;
    }

    int add_row(RowSense sense, double rhs, std::vector<std::pair<int, double>> coeffs) {
        for (auto& [j, a] : coeffs) {
            if (j < 0 || j >= num_vars()) throw ConfigError("row references unknown variable");
            if (!std::isfinite(a)) throw ConfigError("row coefficients must be finite");
        }
        rows.push_back(Row{std::move(coeffs), sense, rhs});
        return num_rows() - 1;
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    std::vector<double> x;              // structural variables
    std::vector<double> duals;          // per row, d(objective)/d(rhs)
    std::vector<double> reduced_costs;  // per structural variable
    int iterations = 0;
    std::string note;
};

struct LpOptions {
    double feas_tol = 1e-8;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-10;
    int max_iterations = 200000;
    /// Optional crash basis: (row, structural column) pairs. Rows not listed
    /// start with their slack basic. Falls back to phase 1 when infeasible.
    std::vector<std::pair<int, int>> basis_hint;
};

namespace detail {

/// Dense bounded-variable primal simplex on [A | slacks | artificials] x = b.
class SimplexTableau {
  public:
    SimplexTableau(const LinearProgram& lp, const LpOptions& opt) : lp_(&lp), opt_(&opt) {
        m_ = lp.num_rows();
        ns_ = lp.num_vars();
        n_ = ns_ + m_;
        double rhs_scale = 1.0;
        for (const auto& row : lp.rows) rhs_scale = std::max(rhs_scale, std::abs(row.rhs));
        feas_abs_ = opt.feas_tol * (1.0 + rhs_scale);
    }

    LpSolution solve() {
        LpSolution sol;
        build(/*with_artificials=*/false);
        if (!try_crash()) {
            build(/*with_artificials=*/true);
            if (!phase_one(sol)) return sol;
        }
        set_phase2_costs();
        if (optimize(sol, /*phase2=*/true) < 0) return sol;
        extract(sol);
        return sol;
    }

  private:
    enum VarState : char { AtLower, AtUpper, Basic, FreeZero };

    const LinearProgram* lp_;
    const LpOptions* opt_;
    int m_ = 0, ns_ = 0, n_ = 0, n_art_ = 0, width_ = 0, rhs_col_ = 0;
    std::vector<double> tab_;  // m x width; last column is beta = B^-1 b
    std::vector<double> lo_, up_, cost_, value_, d_;
    std::vector<char> state_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    double feas_abs_ = 1e-8;
    int iters_ = 0;

    int total_cols() const { return n_ + n_art_; }
    double* row_ptr(int i) { return tab_.data() + static_cast<std::size_t>(i) * width_; }

    double start_value(int j) const {
        if (std::isfinite(lo_[j])) return lo_[j];
        if (std::isfinite(up_[j])) return up_[j];
        return 0.0;
    }

    char start_state(int j) const {
        if (std::isfinite(lo_[j])) return AtLower;
        if (std::isfinite(up_[j])) return AtUpper;
        return FreeZero;
    }

    void build(bool with_artificials) {
        n_art_ = with_artificials ? m_ : 0;
        rhs_col_ = total_cols();
        width_ = rhs_col_ + 1;
        tab_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
        lo_.assign(total_cols(), 0.0);
        up_.assign(total_cols(), 0.0);
        cost_.assign(total_cols(), 0.0);
        value_.assign(total_cols(), 0.0);
        state_.assign(total_cols(), AtLower);
        d_.assign(total_cols(), 0.0);
        basis_.assign(m_, -1);
        in_basis_.assign(total_cols(), false);

        for (int j = 0; j < ns_; ++j) {
            lo_[j] = lp_->lower[j];
            up_[j] = lp_->upper[j];
            cost_[j] = lp_->objective[j];
        }
        for (int i = 0; i < m_; ++i) {
            const auto& row = lp_->rows[i];
            double* t = row_ptr(i);
            for (auto& [j, a] : row.coeffs) t[j] += a;
            const int s = ns_ + i;
            t[s] = 1.0;
            switch (row.sense) {
                case RowSense::LE: lo_[s] = 0.0; up_[s] = kInf; break;
                case RowSense::GE: lo_[s] = -kInf; up_[s] = 0.0; break;
                case RowSense::EQ: lo_[s] = 0.0; up_[s] = 0.0; break;
            }
            t[rhs_col_] = row.rhs;
        }
        if (with_artificials) {
            for (int a = n_; a < n_ + n_art_; ++a) {
                lo_[a] = 0.0;
                up_[a] = kInf;
            }
        }
        for (int j = 0; j < total_cols(); ++j) {
            state_[j] = start_state(j);
            value_[j] = start_value(j);
        }
    }

    /// Slack basis plus the hinted columns; accepted when the implied basic
    /// point is within bounds.
    bool try_crash() {
        for (int i = 0; i < m_; ++i) basis_[i] = ns_ + i;
        for (auto& [r, c] : opt_->basis_hint) {
            if (r < 0 || r >= m_ || c < 0 || c >= ns_) return false;
            basis_[r] = c;
        }
        for (auto& [r, c] : opt_->basis_hint) {
            double* pr = row_ptr(r);
            const double piv = pr[c];
            if (std::abs(piv) < opt_->pivot_tol) return false;
            const double inv = 1.0 / piv;
            for (int k = 0; k < width_; ++k) pr[k] *= inv;
            for (int i = 0; i < m_; ++i) {
                if (i == r) continue;
                double* ri = row_ptr(i);
                const double f = ri[c];
                if (f == 0.0) continue;
                for (int k = 0; k < width_; ++k) ri[k] -= f * pr[k];
            }
        }
        for (int i = 0; i < m_; ++i) {
            in_basis_[basis_[i]] = true;
            state_[basis_[i]] = Basic;
        }
        recompute_basic_values();
        for (int i = 0; i < m_; ++i) {
            const int b = basis_[i];
            if (value_[b] < lo_[b] - feas_abs_ || value_[b] > up_[b] + feas_abs_) return false;
        }
        return true;
    }

    void recompute_basic_values() {
        for (int i = 0; i < m_; ++i) {
            double* t = row_ptr(i);
            double v = t[rhs_col_];
            for (int j = 0; j < total_cols(); ++j) {
                if (in_basis_[j] || value_[j] == 0.0) continue;
                v -= t[j] * value_[j];
            }
            value_[basis_[i]] = v;
        }
    }

    void recompute_reduced_costs() {
        const int tc = total_cols();
        for (int j = 0; j < tc; ++j) d_[j] = cost_[j];
        for (int i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            const double* t = row_ptr(i);
            for (int j = 0; j < tc; ++j) d_[j] -= cb * t[j];
        }
    }

    bool phase_one(LpSolution& sol) {
        // One artificial per row; rows with a negative start residual are
        // negated so the all-artificial basis starts feasible with B = I.
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (int i = 0; i < m_; ++i) {
            double* t = row_ptr(i);
            double r = t[rhs_col_];
            for (int j = 0; j < n_; ++j)
                if (value_[j] != 0.0) r -= t[j] * value_[j];
            if (r < 0.0)
                for (int k = 0; k < width_; ++k) t[k] = -t[k];
            const int a = n_ + i;
            t[a] = 1.0;
            basis_[i] = a;
            in_basis_[a] = true;
            state_[a] = Basic;
            value_[a] = std::abs(r);
            cost_[a] = 1.0;
        }
        recompute_reduced_costs();
        LpSolution tmp;
        if (optimize(tmp, /*phase2=*/false) < 0) {
            sol = tmp;
            if (sol.status == LpStatus::Unbounded) {
                sol.status = LpStatus::NumericalFailure;
                sol.note = "phase 1 claims an unbounded ray";
            }
            return false;
        }
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) infeas += std::abs(value_[basis_[i]]);
        if (infeas > std::max(feas_abs_, 10.0 * opt_->feas_tol)) {
            sol.status = LpStatus::Infeasible;
            sol.iterations = iters_;
            sol.note = "phase 1 ended with positive infeasibility";
            return false;
        }
        // Freeze artificials at zero for phase 2.
        for (int a = n_; a < n_ + n_art_; ++a) {
            up_[a] = 0.0;
            if (!in_basis_[a]) {
                state_[a] = AtLower;
                value_[a] = 0.0;
            }
        }
        return true;
    }

    void set_phase2_costs() {
        for (int j = 0; j < total_cols(); ++j) cost_[j] = (j < ns_) ? lp_->objective[j] : 0.0;
        recompute_reduced_costs();
    }

    /// Returns 0 on optimal for the current costs, -1 otherwise.
    int optimize(LpSolution& sol, bool phase2) {
        const int bland_after = iters_ + 400 + 40 * (m_ + n_);
        int since_refresh = 0;
        while (true) {
            if (++iters_ > opt_->max_iterations) {
                sol.status = LpStatus::NumericalFailure;
                sol.note = "iteration limit reached";
                sol.iterations = iters_;
                return -1;
            }
            if (++since_refresh > 256) {
                recompute_reduced_costs();
                recompute_basic_values();
                since_refresh = 0;
            }
            const bool bland = iters_ > bland_after;
            int enter = -1, dir = 0;
            double best = opt_->opt_tol;
            const int tc = total_cols();
            for (int j = 0; j < tc; ++j) {
                if (in_basis_[j] || lo_[j] == up_[j]) continue;
                const double dj = d_[j];
                int cand = 0;
                if ((state_[j] == AtLower || state_[j] == FreeZero) && dj < -opt_->opt_tol)
                    cand = +1;
                else if ((state_[j] == AtUpper || state_[j] == FreeZero) && dj > opt_->opt_tol)
                    cand = -1;
                if (cand == 0) continue;
                if (bland) {
                    enter = j;
                    dir = cand;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    enter = j;
                    dir = cand;
                }
            }
            if (enter < 0) return 0;

            double limit = kInf;
            int leave_row = -1;
            for (int i = 0; i < m_; ++i) {
                const double a = row_ptr(i)[enter] * dir;
                if (std::abs(a) < opt_->pivot_tol) continue;
                const int b = basis_[i];
                double room;
                if (a > 0.0)
                    room = std::isfinite(lo_[b]) ? (value_[b] - lo_[b]) / a : kInf;
                else
                    room = std::isfinite(up_[b]) ? (value_[b] - up_[b]) / a : kInf;
                if (!std::isfinite(room)) continue;
                if (room < 0.0) room = 0.0;
                if (leave_row < 0 || room < limit - 1e-15 ||
                    (room < limit + 1e-15 && basis_[i] < basis_[leave_row])) {
                    limit = room;
                    leave_row = i;
                }
            }
            const double self_range = (std::isfinite(lo_[enter]) && std::isfinite(up_[enter]))
                                          ? up_[enter] - lo_[enter]
                                          : kInf;
            if (self_range <= limit) {
                if (!std::isfinite(self_range)) {
                    sol.status = phase2 ? LpStatus::Unbounded : LpStatus::NumericalFailure;
                    sol.note = phase2 ? "unbounded ray" : "phase 1 claims an unbounded ray";
                    sol.iterations = iters_;
                    return -1;
                }
                step_nonbasic(enter, dir, self_range);
                state_[enter] = (dir > 0) ? AtUpper : AtLower;
                continue;
            }
            step_nonbasic(enter, dir, limit);
            pivot(leave_row, enter);
        }
    }

    void step_nonbasic(int j, int dir, double t) {
        if (t == 0.0) return;
        value_[j] += dir * t;
        for (int i = 0; i < m_; ++i) {
            const double a = row_ptr(i)[j];
            if (a != 0.0) value_[basis_[i]] -= a * dir * t;
        }
    }

    void pivot(int r, int enter) {
        const int leave = basis_[r];
        double* pr = row_ptr(r);
        const double inv = 1.0 / pr[enter];
        for (int k = 0; k < width_; ++k) pr[k] *= inv;
        pr[enter] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* ri = row_ptr(i);
            const double f = ri[enter];
            if (f == 0.0) continue;
            for (int k = 0; k < width_; ++k) ri[k] -= f * pr[k];
            ri[enter] = 0.0;
        }
        const double de = d_[enter];
        if (de != 0.0) {
            for (int k = 0; k < total_cols(); ++k) d_[k] -= de * pr[k];
            d_[enter] = 0.0;
        }
        in_basis_[leave] = false;
        in_basis_[enter] = true;
        basis_[r] = enter;
        state_[enter] = Basic;
        // The leaving variable sits on the bound it ran into.
        double v = value_[leave];
        const double dist_lo = std::isfinite(lo_[leave]) ? std::abs(v - lo_[leave]) : kInf;
        const double dist_up = std::isfinite(up_[leave]) ? std::abs(v - up_[leave]) : kInf;
        if (dist_lo <= dist_up && std::isfinite(lo_[leave])) {
            state_[leave] = AtLower;
            value_[leave] = lo_[leave];
        } else if (std::isfinite(up_[leave])) {
            state_[leave] = AtUpper;
            value_[leave] = up_[leave];
        } else {
            state_[leave] = FreeZero;
            value_[leave] = 0.0;
        }
    }

    void extract(LpSolution& sol) {
        recompute_reduced_costs();
        recompute_basic_values();
        sol.iterations = iters_;
        sol.x.assign(value_.begin(), value_.begin() + ns_);
        sol.duals.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) sol.duals[i] = -d_[ns_ + i];
        sol.reduced_costs.assign(d_.begin(), d_.begin() + ns_);
        double obj = lp_->constant;
        for (int j = 0; j < ns_; ++j) obj += lp_->objective[j] * sol.x[j];
        sol.objective = obj;
        sol.status = LpStatus::Optimal;

        // Verify before reporting: a broken optimum must never look clean.
        double rhs_scale = 1.0, primal_resid = 0.0;
        for (int i = 0; i < m_; ++i) {
            const auto& row = lp_->rows[i];
            rhs_scale = std::max(rhs_scale, std::abs(row.rhs));
            double ax = 0.0;
            for (auto& [j, a] : row.coeffs) ax += a * sol.x[j];
            double viol = 0.0;
            if (row.sense == RowSense::LE) viol = positive_part(ax - row.rhs);
            else if (row.sense == RowSense::GE) viol = positive_part(row.rhs - ax);
            else viol = std::abs(ax - row.rhs);
            primal_resid = std::max(primal_resid, viol);
        }
        for (int j = 0; j < ns_; ++j) {
            primal_resid = std::max(primal_resid, positive_part(lp_->lower[j] - sol.x[j]));
            primal_resid = std::max(primal_resid, positive_part(sol.x[j] - lp_->upper[j]));
        }
        double dual_obj = lp_->constant;
        for (int i = 0; i < m_; ++i) {
            const double b = lp_->rows[i].rhs;
            // Rows negated during phase 1 keep flipped slack columns; the
            // stored dual already refers to the original orientation because
            // the slack column was negated together with the rhs.
            dual_obj += sol.duals[i] * b;
        }
        for (int j = 0; j < ns_; ++j)
            if (!in_basis_[j] && value_[j] != 0.0) dual_obj += d_[j] * value_[j];
        const double gap = std::abs(sol.objective - dual_obj);
        const double obj_scale = 1.0 + std::abs(sol.objective);
        if (primal_resid > 10.0 * opt_->feas_tol * (1.0 + rhs_scale) || gap > 1e-6 * obj_scale) {
            sol.status = LpStatus::NumericalFailure;
            std::ostringstream os;
            os << "optimum failed verification: primal residual " << primal_resid
               << ", duality gap " << gap;
            sol.note = os.str();
        }
    }
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opt = {}) {
    for (double c : lp.objective)
        if (!std::isfinite(c)) throw ConfigError("objective coefficients must be finite");
    detail::SimplexTableau tableau(lp, opt);
    return tableau.solve();
}

/// Text export in the common LP file format, for debugging stage problems.
inline std::string to_lp_format(const LinearProgram& lp) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "Minimize\n obj:";
    for (int j = 0; j < lp.num_vars(); ++j)
        if (lp.objective[j] != 0.0)
            os << (lp.objective[j] >= 0 ? " + " : " - ") << std::abs(lp.objective[j]) << " x" << j;
    os << "\nSubject To\n";
    for (int i = 0; i < lp.num_rows(); ++i) {
        os << " c" << i << ":";
        for (auto& [j, a] : lp.rows[i].coeffs)
            os << (a >= 0 ? " + " : " - ") << std::abs(a) << " x" << j;
        switch (lp.rows[i].sense) {
            case RowSense::LE: os << " <= "; break;
            case RowSense::GE: os << " >= "; break;
            case RowSense::EQ: os << " = "; break;
        }
        os << lp.rows[i].rhs << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        if (std::isfinite(lp.lower[j]) && lp.lower[j] == lp.upper[j]) {
            os << " x" << j << " = " << lp.lower[j] << "\n";
            continue;
        }
        os << " ";
        if (std::isfinite(lp.lower[j])) os << lp.lower[j] << " <= ";
        else os << "-inf <= ";
        os << "x" << j;
        if (std::isfinite(lp.upper[j])) os << " <= " << lp.upper[j];
        os << "\n";
    }
    os << "End\n";
    return os.str();
}

}  // namespace hydec
