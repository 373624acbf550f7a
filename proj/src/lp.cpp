#include "dpcube/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpcube {

namespace {

constexpr double kPivotTol = 1e-10;

// Column-major sparse matrix of the working problem (structurals, slacks,
// artificials), built once up front.
struct Columns {
    std::vector<int> ptr;
    std::vector<int> row;
    std::vector<double> val;

    int count() const { return static_cast<int>(ptr.size()) - 1; }
};

struct Working {
    Columns cols;
    std::vector<double> rhs;         // b >= 0 after row normalization
    std::vector<double> cost;        // phase-2 costs per column
    int num_structural = 0;
    int first_artificial = 0;        // columns >= this are artificial
};

Working build_working(const LinearProgram& lp) {
    const int m = lp.num_rows();
    Working w;
    w.rhs.resize(m);
    std::vector<double> sign(m, 1.0);
    std::vector<Relation> rel(lp.relations);
    for (int i = 0; i < m; ++i) {
        w.rhs[i] = lp.rhs[i];
        if (w.rhs[i] < 0.0) {
            w.rhs[i] = -w.rhs[i];
            sign[i] = -1.0;
            if (rel[i] == Relation::LessEq) {
                rel[i] = Relation::GreaterEq;
            } else if (rel[i] == Relation::GreaterEq) {
                rel[i] = Relation::LessEq;
            }
        }
    }

    // Bucket triplets by column.
    std::vector<std::vector<std::pair<int, double>>> by_col(lp.num_vars);
    for (const auto& e : lp.entries) {
        if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= lp.num_vars) {
            throw LpSolverError("lp_solve: triplet index out of range");
        }
        if (!std::isfinite(e.value)) throw LpSolverError("lp_solve: non-finite coefficient");
        by_col[e.col].push_back({e.row, e.value * sign[e.row]});
    }

    auto push_column = [&w](const std::vector<std::pair<int, double>>& entries, double cost) {
        for (const auto& [r, v] : entries) {
            w.cols.row.push_back(r);
            w.cols.val.push_back(v);
        }
        w.cols.ptr.push_back(static_cast<int>(w.cols.row.size()));
        w.cost.push_back(cost);
    };

    w.cols.ptr.push_back(0);
    for (int j = 0; j < lp.num_vars; ++j) {
        std::sort(by_col[j].begin(), by_col[j].end());
        push_column(by_col[j], lp.objective[j]);
    }
    w.num_structural = lp.num_vars;

    // Slack / surplus columns.
    for (int i = 0; i < m; ++i) {
        if (rel[i] == Relation::LessEq) {
            push_column({{i, 1.0}}, 0.0);
        } else if (rel[i] == Relation::GreaterEq) {
            push_column({{i, -1.0}}, 0.0);
        }
    }
    w.first_artificial = w.cols.count();
    return w;
}

class RevisedSimplex {
public:
    RevisedSimplex(Working work, double tol) : w_(std::move(work)), tol_(tol), m_(static_cast<int>(w_.rhs.size())) {}

    LpStatus run(LpSolution& out, int num_original_vars) {
        setup_basis();
        if (!phase(true)) {
            out.status = LpStatus::Infeasible;
            out.iterations = iterations_;
            return out.status;
        }
        drive_out_artificials();
        const LpStatus status = phase(false) ? LpStatus::Optimal : LpStatus::Unbounded;
        out.status = status;
        out.iterations = iterations_;
        if (status == LpStatus::Optimal) {
            out.x.assign(num_original_vars, 0.0);
            double obj = 0.0;
            for (int i = 0; i < m_; ++i) {
                const int col = basis_[i];
                if (col < num_original_vars) out.x[col] = beta_[i];
                obj += w_.cost[col] * beta_[i];
            }
            out.objective = obj;
        }
        return status;
    }

private:
    // Initial basis: slacks where a row offers one with +1 sign, artificials
    // elsewhere. Binv starts as the identity.
    void setup_basis() {
        std::vector<int> row_basic(m_, -1);
        for (int j = w_.num_structural; j < w_.first_artificial; ++j) {
            const int p = w_.cols.ptr[j];
            if (w_.cols.val[p] > 0.0) row_basic[w_.cols.row[p]] = j;
        }
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            if (row_basic[i] >= 0) {
                basis_[i] = row_basic[i];
            } else {
                // Append an artificial column for this row.
                w_.cols.row.push_back(i);
                w_.cols.val.push_back(1.0);
                w_.cols.ptr.push_back(static_cast<int>(w_.cols.row.size()));
                w_.cost.push_back(0.0);
                basis_[i] = w_.cols.count() - 1;
            }
        }
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        beta_ = w_.rhs;
    }

    double column_dot(int col, const std::vector<double>& y) const {
        double dot = 0.0;
        for (int p = w_.cols.ptr[col]; p < w_.cols.ptr[col + 1]; ++p) {
            dot += y[w_.cols.row[p]] * w_.cols.val[p];
        }
        return dot;
    }

    // An artificial left basic at level zero after phase 1 must not sit in
    // the basis during phase 2: a later pivot with a negative element in its
    // row would silently lift it (an infeasible point). Swap each one for any
    // real column with a nonzero tableau element in that row; if the whole
    // row is zero the row is redundant and the artificial can never move.
    void drive_out_artificials() {
        std::vector<char> is_basic(w_.cols.count(), 0);
        for (int c : basis_) is_basic[c] = 1;
        std::vector<double> wcol(m_);
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < w_.first_artificial) continue;
            if (beta_[i] < 0.0 || beta_[i] <= tol_) beta_[i] = 0.0;
            for (int j = 0; j < w_.first_artificial; ++j) {
                if (is_basic[j]) continue;
                double t = 0.0;
                const double* binv_row = &binv_[static_cast<std::size_t>(i) * m_];
                for (int p = w_.cols.ptr[j]; p < w_.cols.ptr[j + 1]; ++p) {
                    t += binv_row[w_.cols.row[p]] * w_.cols.val[p];
                }
                if (std::abs(t) <= 1e2 * kPivotTol) continue;
                for (int r = 0; r < m_; ++r) wcol[r] = 0.0;
                for (int p = w_.cols.ptr[j]; p < w_.cols.ptr[j + 1]; ++p) {
                    const int row = w_.cols.row[p];
                    const double v = w_.cols.val[p];
                    for (int r = 0; r < m_; ++r) {
                        wcol[r] += binv_[static_cast<std::size_t>(r) * m_ + row] * v;
                    }
                }
                const int old = basis_[i];
                pivot(j, i, wcol);
                is_basic[j] = 1;
                is_basic[old] = 0;
                break;
            }
        }
    }

    bool phase(bool phase_one) {
        const int ncols = w_.cols.count();
        std::vector<char> is_basic(ncols, 0);
        for (int c : basis_) is_basic[c] = 1;

        std::vector<double> y(m_), wcol(m_);
        auto cost_of = [&](int col) {
            if (phase_one) return col >= w_.first_artificial ? 1.0 : 0.0;
            return w_.cost[col];
        };

        bool bland = false;
        int stall = 0;
        const int stall_limit = 4 * (m_ + 16);
        const long cap = 20000L + 400L * (static_cast<long>(m_) + ncols);

        for (;;) {
            if (++iterations_ > cap) {
                throw LpSolverError("lp_solve: iteration cap exceeded (iterations=" +
                                    std::to_string(iterations_) + ", rows=" + std::to_string(m_) +
                                    ", cols=" + std::to_string(ncols) +
                                    (phase_one ? ", phase=1)" : ", phase=2)"));
            }
            // y = c_B' * Binv
            for (int i = 0; i < m_; ++i) y[i] = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double cb = cost_of(basis_[i]);
                if (cb == 0.0) continue;
                const double* binv_row = &binv_[static_cast<std::size_t>(i) * m_];
                for (int k = 0; k < m_; ++k) y[k] += cb * binv_row[k];
            }

            // Price: entering column with negative reduced cost.
            int enter = -1;
            double best = -tol_;
            for (int j = 0; j < ncols; ++j) {
                if (is_basic[j]) continue;
                if (!phase_one && j >= w_.first_artificial) continue;  // artificials stay out
                const double d = cost_of(j) - column_dot(j, y);
                if (bland) {
                    if (d < -tol_) {
                        enter = j;
                        break;
                    }
                } else if (d < best) {
                    best = d;
                    enter = j;
                }
            }
            if (enter < 0) {
                if (phase_one) {
                    double infeas = 0.0;
                    for (int i = 0; i < m_; ++i) {
                        if (basis_[i] >= w_.first_artificial) infeas += beta_[i];
                    }
                    return infeas <= tol_ * std::max(1.0, norm1(w_.rhs));
                }
                return true;
            }

            // wcol = Binv * A_enter
            for (int i = 0; i < m_; ++i) wcol[i] = 0.0;
            for (int p = w_.cols.ptr[enter]; p < w_.cols.ptr[enter + 1]; ++p) {
                const int r = w_.cols.row[p];
                const double v = w_.cols.val[p];
                for (int i = 0; i < m_; ++i) {
                    wcol[i] += binv_[static_cast<std::size_t>(i) * m_ + r] * v;
                }
            }

            // Ratio test; ties by smallest basic column id (Bland-compatible).
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (wcol[i] > kPivotTol) {
                    const double ratio = beta_[i] / wcol[i];
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && (leave < 0 || basis_[i] < basis_[leave]))) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) {
                if (phase_one) throw LpSolverError("lp_solve: unbounded phase-1 subproblem");
                return false;  // unbounded
            }

            if (best_ratio <= tol_) {
                if (++stall > stall_limit) bland = true;
            } else {
                stall = 0;
                bland = false;
            }

            const int leaving_col = basis_[leave];
            pivot(enter, leave, wcol);
            is_basic[enter] = 1;
            is_basic[leaving_col] = 0;  // may re-enter later
        }
    }

    static double norm1(const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }

    void pivot(int enter, int leave, std::vector<double>& wcol) {
        const double piv = wcol[leave];
        double* leave_row = &binv_[static_cast<std::size_t>(leave) * m_];
        for (int k = 0; k < m_; ++k) leave_row[k] /= piv;
        beta_[leave] /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            const double f = wcol[i];
            if (f == 0.0) continue;
            double* row = &binv_[static_cast<std::size_t>(i) * m_];
            for (int k = 0; k < m_; ++k) row[k] -= f * leave_row[k];
            beta_[i] -= f * beta_[leave];
            if (beta_[i] < 0.0 && beta_[i] > -1e-11) beta_[i] = 0.0;
        }
        basis_[leave] = enter;
    }

    Working w_;
    double tol_;
    int m_;
    std::vector<int> basis_;
    std::vector<double> binv_;  // row-major m x m
    std::vector<double> beta_;  // current basic values
    long iterations_ = 0;
};

}  // namespace

LpSolution lp_solve(const LinearProgram& lp, double tol) {
    if (static_cast<int>(lp.objective.size()) != lp.num_vars) {
        throw LpSolverError("lp_solve: objective size does not match num_vars");
    }
    if (lp.num_rows() == 0) {
        // No constraints: optimum is 0 at x = 0 unless some cost is negative.
        LpSolution out;
        for (double c : lp.objective) {
            if (c < 0.0) {
                out.status = LpStatus::Unbounded;
                return out;
            }
        }
        out.x.assign(lp.num_vars, 0.0);
        return out;
    }
    LpSolution out;
    RevisedSimplex solver(build_working(lp), tol);
    solver.run(out, lp.num_vars);
    return out;
}

}  // namespace dpcube
