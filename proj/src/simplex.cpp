#include "simplex.hpp"

#include <cmath>
#include <limits>

namespace gapkit {

namespace {
constexpr double kPivTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;
}  // namespace

// Full-tableau two-phase simplex. Dantzig pricing with a switch to Bland's
// rule after a burn-in to guarantee termination.
LpResult solve_lp(const LinearProgram& lp) {
    const int n_orig = lp.num_vars();
    const int m = lp.num_rows();
    const auto& rows = lp.rows();

    // Column layout: for each original var either one nonneg column or a +/- pair.
    std::vector<int> col_pos(n_orig), col_neg(n_orig, -1);
    int n = 0;
    for (int j = 0; j < n_orig; ++j) {
        col_pos[j] = n++;
        if (!lp.nonneg_flags()[j]) col_neg[j] = n++;
    }
    const int n_struct = n;
    // Slack/surplus columns.
    std::vector<int> slack_col(m, -1);
    for (int i = 0; i < m; ++i)
        if (rows[i].rel != LinearProgram::EQ) slack_col[i] = n++;
    const int n_with_slack = n;
    // Artificial columns assigned below as needed.

    // Dense constraint matrix in standard form A z = b, z >= 0, b >= 0.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n_with_slack + m);
    Eigen::VectorXd b(m);
    std::vector<int> basis(m, -1);
    int n_total = n_with_slack;

    for (int i = 0; i < m; ++i) {
        double sgn = 1.0;
        double rhs = rows[i].rhs;
        double slack_sign = rows[i].rel == LinearProgram::LE ? 1.0 : (rows[i].rel == LinearProgram::GE ? -1.0 : 0.0);
        if (rhs < 0) {
            sgn = -1.0;
            rhs = -rhs;
            slack_sign = -slack_sign;
        }
        for (auto& t : rows[i].terms) {
            A(i, col_pos[t.first]) += sgn * t.second;
            if (col_neg[t.first] >= 0) A(i, col_neg[t.first]) -= sgn * t.second;
        }
        b(i) = rhs;
        if (slack_col[i] >= 0) A(i, slack_col[i]) = slack_sign;
        if (slack_sign > 0) {
            basis[i] = slack_col[i];  // slack is a valid starting basic var
        } else {
            int art = n_total++;
            A(i, art) = 1.0;
            basis[i] = art;
        }
    }
    A.conservativeResize(m, n_total);

    // Row equilibration for numerical stability.
    for (int i = 0; i < m; ++i) {
        double s = std::max(A.row(i).cwiseAbs().maxCoeff(), std::fabs(b(i)));
        if (s > 0) {
            A.row(i) /= s;
            b(i) /= s;
        }
    }

    Eigen::VectorXd tab_b = b;
    Eigen::MatrixXd T = A;  // working tableau

    auto pivot = [&](int r, int c) {
        double p = T(r, c);
        T.row(r) /= p;
        tab_b(r) /= p;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            double f = T(i, c);
            if (f != 0.0) {
                T.row(i) -= f * T.row(r);
                tab_b(i) -= f * tab_b(r);
            }
        }
        basis[r] = c;
    };

    // Runs the simplex loop for the cost vector `cost` over active columns
    // [0, limit). Returns false on iteration trouble, sets unbounded flag.
    bool unbounded = false;
    auto run_phase = [&](const Eigen::VectorXd& cost, int limit) -> bool {
        // Reduced-cost row: z = cost - cost_B^T * T
        Eigen::VectorXd red = cost.head(limit);
        double obj_shift = 0.0;
        for (int i = 0; i < m; ++i) {
            double cb = cost(basis[i]);
            if (cb != 0.0) {
                red -= cb * T.row(i).head(limit).transpose();
                obj_shift += cb * tab_b(i);
            }
        }
        (void)obj_shift;
        long iter = 0;
        const long bland_after = 50L * (m + limit) + 200;
        const long max_iter = 500L * (m + limit) + 5000;
        while (true) {
            if (++iter > max_iter) return false;
            bool bland = iter > bland_after;
            int enter = -1;
            if (bland) {
                for (int j = 0; j < limit; ++j)
                    if (red(j) < -kCostTol) {
                        enter = j;
                        break;
                    }
            } else {
                double best = -kCostTol;
                for (int j = 0; j < limit; ++j)
                    if (red(j) < best) {
                        best = red(j);
                        enter = j;
                    }
            }
            if (enter < 0) return true;  // optimal
            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                double a = T(i, enter);
                if (a > kPivTol) {
                    double ratio = tab_b(i) / a;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && leave >= 0 && basis[i] < basis[leave])) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) {
                unbounded = true;
                return true;
            }
            pivot(leave, enter);
            // Update reduced costs incrementally.
            double f = red(enter);
            if (f != 0.0) red -= f * T.row(leave).head(limit).transpose();
        }
    };

    LpResult res;

    // Phase 1: minimize sum of artificials (if any).
    if (n_total > n_with_slack) {
        Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n_total);
        for (int j = n_with_slack; j < n_total; ++j) cost1(j) = 1.0;
        if (!run_phase(cost1, n_total)) {
            res.status = LpResult::IterLimit;
            return res;
        }
        double phase1 = 0.0;
        for (int i = 0; i < m; ++i)
            if (basis[i] >= n_with_slack) phase1 += tab_b(i);
        if (phase1 > kFeasTol) {
            res.status = LpResult::Infeasible;
            return res;
        }
        // Drive artificials out of the basis where possible.
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n_with_slack) continue;
            int c = -1;
            for (int j = 0; j < n_with_slack; ++j)
                if (std::fabs(T(i, j)) > 1e-7) {
                    c = j;
                    break;
                }
            if (c >= 0) pivot(i, c);
            // else: redundant row; harmless to leave the artificial at level ~0.
        }
        unbounded = false;
    }

    // Phase 2.
    Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n_total);
    const auto& obj = lp.objective();
    for (int j = 0; j < n_orig; ++j) {
        cost2(col_pos[j]) = obj[j];
        if (col_neg[j] >= 0) cost2(col_neg[j]) = -obj[j];
    }
    // Penalize any artificial still basic at zero level so it never re-enters.
    if (!run_phase(cost2, n_with_slack)) {
        res.status = LpResult::IterLimit;
        return res;
    }
    if (unbounded) {
        res.status = LpResult::Unbounded;
        return res;
    }

    Eigen::VectorXd z = Eigen::VectorXd::Zero(n_total);
    for (int i = 0; i < m; ++i)
        if (basis[i] >= 0) z(basis[i]) = tab_b(i);
    res.x.resize(n_orig);
    for (int j = 0; j < n_orig; ++j) {
        double v = z(col_pos[j]);
        if (col_neg[j] >= 0) v -= z(col_neg[j]);
        res.x(j) = v;
    }
    double val = 0.0;
    for (int j = 0; j < n_orig; ++j) val += obj[j] * res.x(j);
    res.value = val;
    res.status = LpResult::Optimal;
    return res;
}

}  // namespace gapkit
