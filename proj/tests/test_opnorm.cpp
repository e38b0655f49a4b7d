#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>

#include "../src/dist.hpp"
#include "../src/opnorm.hpp"
#include "../src/rng.hpp"
#include "../vendor/doctest.h"

using namespace gapkit;

namespace {

double max_col_l1(const Mat& A) {
    double m = 0.0;
    for (int j = 0; j < A.cols(); ++j) m = std::max(m, A.col(j).cwiseAbs().sum());
    return m;
}

double max_row_l1(const Mat& A) {
    double m = 0.0;
    for (int i = 0; i < A.rows(); ++i) m = std::max(m, A.row(i).cwiseAbs().sum());
    return m;
}

}  // namespace

TEST_CASE("linear_map_validation_and_kernel") {
    Space l13 = make_lp(3, 1.0);
    Space l12 = make_lp(2, 1.0);
    Mat A(2, 3);
    A << 1, 0, 1, 0, 1, 1;
    LinearMap T = make_linear_map(l13, l12, A);
    Mat K = kernel_basis(T);
    CHECK(K.cols() == 1);
    CHECK((T.A * K).norm() <= 1e-10 * (1.0 + T.A.norm()));
    CHECK((K.transpose() * K - Mat::Identity(1, 1)).norm() <= 1e-12);

    CHECK_THROWS_AS(make_linear_map(l12, l12, A), std::invalid_argument);

    // Full-rank map: empty kernel. Zero map: full kernel.
    LinearMap Id = make_linear_map(l12, l12, Mat::Identity(2, 2));
    CHECK(kernel_basis(Id).cols() == 0);
    LinearMap Zm = make_linear_map(l13, l12, Mat::Zero(2, 3));
    CHECK(kernel_basis(Zm).cols() == 3);
}

TEST_CASE("op_norm_pinned_values") {
    // identity on a taxicab 3-space has norm one
    Space l13 = make_lp(3, 1.0);
    Bound b = op_norm(make_linear_map(l13, l13, Mat::Identity(3, 3)));
    CHECK(b.lo <= 1.0);
    CHECK(b.hi >= 1.0);
    CHECK(b.hi - b.lo <= 1e-9);

    // diag(2,3) on the max norm: value 3
    Space li2 = make_lp(2, kInf);
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 3.0;
    Bound bd = op_norm(make_linear_map(li2, li2, D));
    CHECK(bd.lo <= 3.0 + 1e-12);
    CHECK(bd.hi >= 3.0 - 1e-12);
    CHECK(bd.hi - bd.lo <= 1e-9);

    // rank-zero map
    Bound bz = op_norm(make_linear_map(li2, li2, Mat::Zero(2, 2)));
    CHECK(bz.lo == 0.0);
    CHECK(bz.hi <= 1e-12);
}

TEST_CASE("op_norm_classic_matrix_norm_oracles") {
    Rng rng(11);
    Space l13 = make_lp(3, 1.0);
    Space li3 = make_lp(3, kInf);
    Space l23 = make_lp(3, 2.0);
    for (int t = 0; t < 12; ++t) {
        Mat A = rng.gaussian_matrix(3, 3);
        // 1 -> 1: max column sum; inf -> inf: max row sum; 1 -> inf: max entry;
        // 2 -> 2: top singular value.
        Bound b11 = op_norm(make_linear_map(l13, l13, A));
        CHECK(b11.lo <= max_col_l1(A) + 1e-9);
        CHECK(b11.hi >= max_col_l1(A) - 1e-9);
        CHECK(b11.hi - b11.lo <= 1e-8);

        Bound bii = op_norm(make_linear_map(li3, li3, A));
        CHECK(bii.lo <= max_row_l1(A) + 1e-9);
        CHECK(bii.hi >= max_row_l1(A) - 1e-9);

        Bound b1i = op_norm(make_linear_map(l13, li3, A));
        double mx = A.cwiseAbs().maxCoeff();
        CHECK(b1i.lo <= mx + 1e-9);
        CHECK(b1i.hi >= mx - 1e-9);

        Bound b22 = op_norm(make_linear_map(l23, l23, A));
        Eigen::JacobiSVD<Mat> svd(A);
        double smax = svd.singularValues()(0);
        CHECK(b22.lo <= smax + 1e-9);
        CHECK(b22.hi >= smax - 1e-9);
        CHECK(b22.hi - b22.lo <= 1e-9 * (1.0 + smax));
    }
}

TEST_CASE("op_norm_weighted_euclidean_route") {
    // domain ||x|| = |G x| with G = diag(1, 2); codomain plain Euclidean.
    Vec w(2);
    w << 1.0, 4.0;  // weighted-l2 weights are squared factors
    Space dom = make_weighted_lp(2.0, w);
    Space cod = make_lp(2, 2.0);
    Mat A(2, 2);
    A << 0, 1, 1, 0;
    // ||A x||_2 over |diag(1,2) x|_2 <= 1: x = (u, v/2), image (v/2, u),
    // maximize sqrt(u^2 + v^2/4) over u^2 + v^2 <= 1 -> 1 at v = 0.
    Bound b = op_norm(make_linear_map(dom, cod, A));
    CHECK(b.lo <= 1.0 + 1e-10);
    CHECK(b.hi >= 1.0 - 1e-10);
    CHECK(b.hi - b.lo <= 1e-9);
}

TEST_CASE("op_norm_submultiplicative_on_polyhedral") {
    Rng rng(7);
    Space l14 = make_lp(4, 1.0);
    for (int t = 0; t < 8; ++t) {
        Mat A = rng.gaussian_matrix(4, 4), B = rng.gaussian_matrix(4, 4);
        Bound ba = op_norm(make_linear_map(l14, l14, A));
        Bound bb = op_norm(make_linear_map(l14, l14, B));
        Bound bab = op_norm(make_linear_map(l14, l14, A * B));
        CHECK(bab.lo <= ba.hi * bb.hi + 1e-8);
    }
}

TEST_CASE("op_norm_net_route_on_smooth_norms") {
    // identity from a 4-norm plane into the Euclidean plane: value 2^(1/4).
    Space l42 = make_lp(2, 4.0);
    Space l22 = make_lp(2, 2.0);
    Bound b = op_norm(make_linear_map(l42, l22, Mat::Identity(2, 2)));
    double truth = std::pow(2.0, 0.25);
    CHECK(b.lo <= truth + 1e-9);
    CHECK(b.hi >= truth - 1e-9);
    CHECK(b.hi - b.lo <= 0.05);
    CHECK(b.lo >= truth - 0.02);
}

TEST_CASE("op_norm_force_net_brackets_exact_value") {
    Space l22 = make_lp(2, 2.0);
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 3.0;
    ComputeCfg cfg;
    cfg.force = ForceRoute::ForceNet;
    Bound net = op_norm(make_linear_map(l22, l22, D), cfg);
    CHECK(net.lo <= 3.0);
    CHECK(net.hi >= 3.0);
    CHECK(net.hi - net.lo <= 0.1);
}

TEST_CASE("min_modulus_pinned_values") {
    // identity on Euclidean n-space: gamma = 1
    for (int n : {2, 3, 4}) {
        Space l2n = make_lp(n, 2.0);
        Bound g = min_modulus(make_linear_map(l2n, l2n, Mat::Identity(n, n)));
        CHECK(g.lo <= 1.0);
        CHECK(g.hi >= 1.0);
        CHECK(g.hi - g.lo <= 1e-9);
    }
    // diag(2,0) on the Euclidean plane: kernel is the second axis, gamma = 2
    Space l22 = make_lp(2, 2.0);
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 2.0;
    Bound g = min_modulus(make_linear_map(l22, l22, D));
    CHECK(g.lo <= 2.0);
    CHECK(g.hi >= 2.0);
    CHECK(g.hi - g.lo <= 1e-9);

    // zero map: infinite marker
    Bound gz = min_modulus(make_linear_map(l22, l22, Mat::Zero(2, 2)));
    CHECK(is_infinite_bound(gz));
}

TEST_CASE("min_modulus_euclidean_equals_smallest_nonzero_singular_value") {
    Rng rng(23);
    Space dom = make_lp(4, 2.0);
    Space cod = make_lp(3, 2.0);
    for (int t = 0; t < 10; ++t) {
        Mat A = rng.gaussian_matrix(3, 4);  // generic: rank 3, kernel dim 1
        Bound g = min_modulus(make_linear_map(dom, cod, A));
        Eigen::JacobiSVD<Mat> svd(A);
        double snz = svd.singularValues()(2);
        CHECK(g.lo <= snz + 1e-9);
        CHECK(g.hi >= snz - 1e-9);
        CHECK(g.hi - g.lo <= 1e-8 * (1.0 + snz));
    }
}

TEST_CASE("min_modulus_polyhedral_facet_route") {
    // T = [[1,0],[1,1]] on the taxicab plane (injective): dense-grid oracle.
    Space l12 = make_lp(2, 1.0);
    Mat A(2, 2);
    A << 1, 0, 1, 1;
    Bound g = min_modulus(make_linear_map(l12, l12, A));
    CHECK(g.hi - g.lo <= 1e-8);
    double oracle = kInf;
    const int M = 4000;
    for (int i = 0; i < M; ++i) {
        double t = static_cast<double>(i) / M;           // taxicab sphere edge
        for (double s1 : {1.0, -1.0})
            for (double s2 : {1.0, -1.0}) {
                Vec x(2);
                x << s1 * t, s2 * (1.0 - t);
                oracle = std::min(oracle, norm(l12, A * x));
            }
    }
    CHECK(g.lo <= oracle + 1e-9);
    CHECK(g.hi >= oracle - 1e-3);  // grid is only a near-minimizer
    CHECK(g.lo == doctest::Approx(0.5).epsilon(1e-6));

    // Map with a kernel: row-sum functional into the taxicab line.
    Space l11 = make_lp(1, 1.0);
    Mat S(1, 2);
    S << 1, 1;
    Bound gs = min_modulus(make_linear_map(l12, l11, S));
    CHECK(gs.lo <= 1.0);
    CHECK(gs.hi >= 1.0);
    CHECK(gs.hi - gs.lo <= 1e-8);
}

TEST_CASE("min_modulus_net_route_on_smooth_norms") {
    // identity from the Euclidean plane into the 4-norm plane: inf = 2^(-1/4).
    Space l22 = make_lp(2, 2.0);
    Space l42 = make_lp(2, 4.0);
    Bound g = min_modulus(make_linear_map(l22, l42, Mat::Identity(2, 2)));
    double truth = std::pow(2.0, -0.25);
    CHECK(g.lo <= truth + 1e-9);
    CHECK(g.hi >= truth - 1e-9);
    CHECK(g.hi - g.lo <= 0.05);
}

TEST_CASE("min_modulus_net_agrees_with_singular_value_fast_path") {
    Space l22 = make_lp(2, 2.0);
    Mat D = Mat::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 0.5;
    LinearMap T = make_linear_map(l22, l22, D);
    Bound fast = min_modulus(T);
    ComputeCfg cfg;
    cfg.force = ForceRoute::ForceNet;
    Bound net = min_modulus(T, cfg);
    CHECK(net.lo <= fast.hi + 1e-12);
    CHECK(net.hi >= fast.lo - 1e-12);
    CHECK(net.hi - net.lo <= 0.1);
}

TEST_CASE("min_modulus_pointwise_inequality") {
    // gamma(T) <= ||T x|| whenever dist(x, ker T) = 1.
    Rng rng(5);
    Space dom = make_lp(3, 1.0);
    Space cod = make_lp(2, kInf);
    Mat A(2, 3);
    A << 1, 2, 0, 0, 1, 1;
    LinearMap T = make_linear_map(dom, cod, A);
    Bound g = min_modulus(T);
    Subspace ker = make_subspace(dom, kernel_basis(T));
    int tested = 0;
    for (int i = 0; i < 60; ++i) {
        Vec x = rng.unit_vector(3);
        DistResult d = dist_to_subspace(dom, x, ker);
        if (d.bound.lo <= 1e-9) continue;
        x /= d.bound.lo;  // dist(x, ker) >= 1 now, so ||Tx|| >= gamma
        CHECK(norm(cod, A * x) >= g.lo * (1.0 - 1e-7) - 1e-9);
        ++tested;
    }
    CHECK(tested >= 40);
}

TEST_CASE("min_modulus_force_exact_unavailable_throws") {
    Space l42 = make_lp(2, 4.0);
    ComputeCfg cfg;
    cfg.force = ForceRoute::ForceExact;
    CHECK_THROWS_AS(min_modulus(make_linear_map(l42, l42, Mat::Identity(2, 2)), cfg),
                    std::runtime_error);
    CHECK_THROWS_AS(op_norm(make_linear_map(l42, l42, Mat::Identity(2, 2)), cfg),
                    std::runtime_error);
}
