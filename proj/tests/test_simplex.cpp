// LP solver tests: closed-form problems, brute-force vertex oracle on random
// bounded polytopes, degenerate/infeasible/unbounded cases.
#include "simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "rng.hpp"
#include "test_harness.hpp"

using namespace gapkit;

TEST_CASE(basic_2d) {
    // min -x - 2y  s.t. x + y <= 4, x <= 3, y <= 2, x,y >= 0  -> (2,2), value -6
    LinearProgram lp;
    int x = lp.add_var(-1.0, true), y = lp.add_var(-2.0, true);
    lp.add_row(LinExpr::var(x).add(y, 1.0), LinearProgram::LE, 4.0);
    lp.add_row(LinExpr::var(x), LinearProgram::LE, 3.0);
    lp.add_row(LinExpr::var(y), LinearProgram::LE, 2.0);
    auto r = solve_lp(lp);
    CHECK(r.ok());
    CHECK_NEAR(r.value, -6.0, 1e-9);
    CHECK_NEAR(r.x(0), 2.0, 1e-9);
    CHECK_NEAR(r.x(1), 2.0, 1e-9);
}

TEST_CASE(free_vars_equality) {
    // min |v| modeled as min t, -t <= v <= t, with v free fixed by 3v = -6.
    LinearProgram lp;
    int v = lp.add_var(0.0, false), t = lp.add_var(1.0, true);
    lp.add_row(LinExpr::var(v, 3.0), LinearProgram::EQ, -6.0);
    lp.add_row(LinExpr::var(v).add(t, -1.0), LinearProgram::LE, 0.0);
    lp.add_row(LinExpr::var(v, -1.0).add(t, -1.0), LinearProgram::LE, 0.0);
    auto r = solve_lp(lp);
    CHECK(r.ok());
    CHECK_NEAR(r.x(0), -2.0, 1e-9);
    CHECK_NEAR(r.value, 2.0, 1e-9);
}

TEST_CASE(l1_distance_point_to_line) {
    // dist_1((1,0), {(s, a s)}) = a for 0 < a <= 1: min |1-s| + |a s - 0|.
    for (double a : {0.25, 0.5, 0.9, 1.0}) {
        LinearProgram lp;
        int s = lp.add_var(0.0, false);
        int t1 = lp.add_var(1.0, true), t2 = lp.add_var(1.0, true);
        // t1 >= |1 - s|
        lp.add_row(LinExpr::var(s, -1.0).add(t1, -1.0), LinearProgram::LE, -1.0);
        lp.add_row(LinExpr::var(s, 1.0).add(t1, -1.0), LinearProgram::LE, 1.0);
        // t2 >= |a s|
        lp.add_row(LinExpr::var(s, a).add(t2, -1.0), LinearProgram::LE, 0.0);
        lp.add_row(LinExpr::var(s, -a).add(t2, -1.0), LinearProgram::LE, 0.0);
        auto r = solve_lp(lp);
        CHECK(r.ok());
        CHECK_NEAR(r.value, a, 1e-9);
    }
}

TEST_CASE(infeasible) {
    LinearProgram lp;
    int x = lp.add_var(1.0, true);
    lp.add_row(LinExpr::var(x), LinearProgram::LE, 1.0);
    lp.add_row(LinExpr::var(x), LinearProgram::GE, 2.0);
    auto r = solve_lp(lp);
    CHECK(r.status == LpResult::Infeasible);
}

TEST_CASE(unbounded) {
    LinearProgram lp;
    int x = lp.add_var(-1.0, true);
    lp.add_row(LinExpr::var(x), LinearProgram::GE, 1.0);
    auto r = solve_lp(lp);
    CHECK(r.status == LpResult::Unbounded);
}

TEST_CASE(degenerate_cycling_guard) {
    // Classic Beale-style degenerate LP; must terminate at optimum -0.05.
    LinearProgram lp;
    int x1 = lp.add_var(-0.75, true), x2 = lp.add_var(150.0, true);
    int x3 = lp.add_var(-0.02, true), x4 = lp.add_var(6.0, true);
    lp.add_row(LinExpr::var(x1, 0.25).add(x2, -60.0).add(x3, -0.04).add(x4, 9.0),
               LinearProgram::LE, 0.0);
    lp.add_row(LinExpr::var(x1, 0.5).add(x2, -90.0).add(x3, -0.02).add(x4, 3.0),
               LinearProgram::LE, 0.0);
    lp.add_row(LinExpr::var(x3), LinearProgram::LE, 1.0);
    auto r = solve_lp(lp);
    CHECK(r.ok());
    CHECK_NEAR(r.value, -0.05, 1e-9);
}

// Brute-force oracle: optimum of a bounded LP over {Ax <= b} equals the best
// objective over all vertices (solve all d-subsets of tight constraints).
static double vertex_oracle(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& c, bool* found) {
    const int m = static_cast<int>(A.rows()), d = static_cast<int>(A.cols());
    double best = 0.0;
    *found = false;
    std::vector<int> idx(d);
    std::function<void(int, int)> rec = [&](int start, int k) {
        if (k == d) {
            Eigen::MatrixXd M(d, d);
            Eigen::VectorXd rhs(d);
            for (int i = 0; i < d; ++i) {
                M.row(i) = A.row(idx[i]);
                rhs(i) = b(idx[i]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (!lu.isInvertible()) return;
            Eigen::VectorXd x = lu.solve(rhs);
            if (((A * x).array() <= b.array() + 1e-7).all()) {
                double v = c.dot(x);
                if (!*found || v < best) best = v;
                *found = true;
            }
            return;
        }
        for (int i = start; i < m; ++i) {
            idx[k] = i;
            rec(i + 1, k + 1);
        }
    };
    rec(0, 0);
    return best;
}

TEST_CASE(random_polytopes_vs_vertex_oracle) {
    Rng rng(42);
    int tested = 0;
    for (int trial = 0; trial < 60; ++trial) {
        int d = 2 + rng.uniform_int(2);  // 2 or 3
        int m = d + 2 + rng.uniform_int(5);
        Eigen::MatrixXd A(m + 2 * d, d);
        Eigen::VectorXd b(m + 2 * d);
        for (int i = 0; i < m; ++i) {
            A.row(i) = rng.unit_vector(d).transpose();
            b(i) = rng.uniform(0.2, 2.0);
        }
        // Box constraints guarantee boundedness.
        for (int j = 0; j < d; ++j) {
            A.row(m + 2 * j).setZero();
            A(m + 2 * j, j) = 1.0;
            b(m + 2 * j) = 3.0;
            A.row(m + 2 * j + 1).setZero();
            A(m + 2 * j + 1, j) = -1.0;
            b(m + 2 * j + 1) = 3.0;
        }
        Eigen::VectorXd c = rng.gaussian_vector(d);

        bool found = false;
        double oracle = vertex_oracle(A, b, c, &found);
        CHECK(found);  // 0 is feasible so a vertex exists

        LinearProgram lp;
        std::vector<int> vars(d);
        for (int j = 0; j < d; ++j) vars[j] = lp.add_var(c(j), false);
        for (int i = 0; i < A.rows(); ++i) {
            LinExpr e;
            for (int j = 0; j < d; ++j) e.add(vars[j], A(i, j));
            lp.add_row(e, LinearProgram::LE, b(i));
        }
        auto r = solve_lp(lp);
        CHECK(r.ok());
        if (r.ok() && found) {
            CHECK_NEAR(r.value, oracle, 1e-7);
            ++tested;
        }
    }
    CHECK(tested >= 55);
}

TEST_MAIN()
