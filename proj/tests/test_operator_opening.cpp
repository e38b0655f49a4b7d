#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>

#include "../src/operator_opening.hpp"
#include "../src/rng.hpp"
#include "../vendor/doctest.h"

using namespace gapkit;

namespace {

struct Lines {
    Space amb;
    Subspace y1, y2, y3;
};

// Taxicab plane with the lines {y = 0}, {y = ax} (a = 1/2), {y = x}.
Lines taxicab_lines() {
    Space l12 = make_lp(2, 1.0);
    Mat b1(2, 1), b2(2, 1), b3(2, 1);
    b1 << 1, 0;
    b2 << 1, 0.5;
    b3 << 1, 1;
    return {l12, make_subspace(l12, b1), make_subspace(l12, b2), make_subspace(l12, b3)};
}

Subspace random_subspace(const Space& amb, int k, Rng& rng) {
    return make_subspace(amb, rng.gaussian_matrix(amb->dim, k));
}

}  // namespace

TEST_CASE("r0_equal_subspace_is_zero_with_identity_witness") {
    for (double p : {1.0, 2.0}) {
        Space amb = make_lp(3, p);
        Rng rng(3);
        Mat B = rng.gaussian_matrix(3, 2);
        Subspace Y = make_subspace(amb, B);
        Mat rot(2, 2);
        rot << 0.6, -0.8, 0.8, 0.6;  // same span, different generators
        Subspace Z = make_subspace(amb, Mat(B * rot));
        OperatorGapReport r = r0_bounds(Y, Z);
        CHECK(r.bound.lo <= 1e-9);
        CHECK(r.bound.hi <= 1e-8);
        REQUIRE(r.witness.has_value());
        CHECK((*r.witness - Mat::Identity(3, 3)).norm() <= 1e-6);
    }
}

TEST_CASE("r0_dimension_mismatch_caps_at_one") {
    Space amb = make_lp(3, 1.0);
    Rng rng(5);
    Subspace Y = random_subspace(amb, 2, rng);
    Subspace Z = random_subspace(amb, 1, rng);
    OperatorGapReport r = r0_bounds(Y, Z);
    CHECK(r.bound.hi == 1.0);
    CHECK(!r.witness.has_value());
    CHECK(r.upper_route.find("cap") != std::string::npos);
}

TEST_CASE("r_encloses_taxicab_line_value") {
    Lines L = taxicab_lines();
    OperatorGapReport r = r_bounds(L.y1, L.y2);
    CHECK(r.bound.lo <= 0.5);
    CHECK(r.bound.hi >= 0.5 - 1e-9);
    CHECK(r.bound.hi <= 0.55);  // the shear witness achieves exactly 1/2
    REQUIRE(r.witness.has_value());
    // witness maps the basis of one line into the other: check both directions
    Mat C = *r.witness;
    CHECK(std::abs(C.determinant()) > 1e-8);
}

TEST_CASE("r_witness_maps_basis_into_target") {
    Lines L = taxicab_lines();
    OperatorGapReport r = r0_bounds(L.y1, L.y2);
    REQUIRE(r.witness.has_value());
    Mat img = (*r.witness) * L.y1.basis;
    // residual of img against span(Z)
    Mat res = img - L.y2.basis * (L.y2.basis.transpose() * img);
    CHECK(res.norm() <= 1e-9);
    CHECK(std::abs(r.witness->determinant()) > 1e-8);
}

TEST_CASE("r_lower_never_below_theta_and_range") {
    Rng rng(17);
    Space amb = make_lp(3, kInf);
    ComputeCfg cfg;
    cfg.budget = 50000;  // fewer multistarts for the property sweep
    for (int t = 0; t < 4; ++t) {
        Subspace Y = random_subspace(amb, 1 + (t % 2), rng);
        Subspace Z = random_subspace(amb, 1 + (t % 2), rng);
        OperatorGapReport r = r_bounds(Y, Z, cfg);
        GapReport th = theta(Y, Z, cfg);
        CHECK(r.bound.lo >= th.bound.lo - 1e-6);
        CHECK(r.bound.lo >= 0.0);
        CHECK(r.bound.hi <= 1.0);
        CHECK(r.bound.lo <= r.bound.hi + 1e-15);
        // symmetry by construction
        OperatorGapReport rs = r_bounds(Z, Y, cfg);
        CHECK(r.bound.lo == doctest::Approx(rs.bound.lo).epsilon(1e-12));
        CHECK(r.bound.hi == doctest::Approx(rs.bound.hi).epsilon(1e-12));
    }
}

TEST_CASE("hilbert_collapse_upper_minus_lower_small") {
    Rng rng(29);
    Space amb = make_lp(4, 2.0);
    for (int t = 0; t < 5; ++t) {
        Subspace Y = random_subspace(amb, 2, rng);
        Subspace Z = random_subspace(amb, 2, rng);
        OperatorGapReport r = r_bounds(Y, Z);
        CHECK(r.bound.hi - r.bound.lo <= 2e-3);
    }
}

TEST_CASE("dop_metric_values_and_weakened_triangle") {
    // equal subspaces
    Space l22 = make_lp(2, 2.0);
    Mat b(2, 1);
    b << 1, 0;
    Subspace Y = make_subspace(l22, b);
    CHECK(dop_metric(Y, Y) <= 1e-8);

    // Euclidean lines at angle phi: d_op = log(1 + sin phi)
    const double pi = 3.14159265358979323846;
    for (double phi : {pi / 6, pi / 4, 1.1}) {
        Mat c(2, 1);
        c << std::cos(phi), std::sin(phi);
        Subspace Z = make_subspace(l22, c);
        CHECK(dop_metric(Y, Z) ==
              doctest::Approx(std::log1p(std::sin(phi))).epsilon(1e-3));
    }

    // weakened triangle, pessimistic sides: log1p(r(Y,Z).lo) <= d(Y,W)+d(W,Z)
    Rng rng(31);
    ComputeCfg cfg;
    cfg.budget = 50000;
    for (double p : {1.0, 2.0}) {
        Space amb = make_lp(3, p);
        Subspace A = random_subspace(amb, 1, rng);
        Subspace B = random_subspace(amb, 1, rng);
        Subspace C = random_subspace(amb, 1, rng);
        double lhs = std::log1p(r_bounds(A, C, cfg).bound.lo);
        CHECK(lhs <= dop_metric(A, B, cfg) + dop_metric(B, C, cfg) + 1e-6);
    }
}

TEST_CASE("inverse_bound_explicit_matrices") {
    Space li2 = make_lp(2, kInf);
    // identity: everything zero
    InverseBoundReport r0 = inverse_bound_check(li2, Mat::Identity(2, 2));
    CHECK(r0.applicable);
    CHECK(r0.ok);
    CHECK(r0.lhs <= 1e-9);

    // diag(1.2, 1): u = 0.2, ||C^{-1} - I|| = 1/6 <= 0.25
    Mat C = Mat::Identity(2, 2);
    C(0, 0) = 1.2;
    InverseBoundReport r1 = inverse_bound_check(li2, C);
    CHECK(r1.applicable);
    CHECK(r1.u == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(r1.lhs == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    CHECK(r1.rhs >= 0.25);
    CHECK(r1.ok);

    // u >= 1: skipped
    Mat C2 = Mat::Identity(2, 2);
    C2(0, 0) = 3.0;
    InverseBoundReport r2 = inverse_bound_check(li2, C2);
    CHECK(!r2.applicable);
}

TEST_CASE("inverse_bound_from_pair_witness") {
    Lines L = taxicab_lines();
    InverseBoundReport r = inverse_bound_check(L.y1, L.y2);
    CHECK(r.applicable);
    CHECK(r.u < 1.0);
    CHECK(r.ok);
}

TEST_CASE("lambda_proj_pinned_values") {
    // coordinate axis in the taxicab 3-space: coordinate projection has norm 1
    Space l13 = make_lp(3, 1.0);
    Mat e1 = Mat::Zero(3, 1);
    e1(0, 0) = 1.0;
    LambdaReport a = lambda_proj(make_subspace(l13, e1));
    CHECK(a.bound.lo == 1.0);
    CHECK(a.bound.hi <= 1.0 + 1e-8);

    // diagonal of the Euclidean plane: orthogonal projection has norm 1
    Space l22 = make_lp(2, 2.0);
    Mat d(2, 1);
    d << 1, 1;
    LambdaReport b = lambda_proj(make_subspace(l22, d));
    CHECK(b.bound.lo == 1.0);
    CHECK(b.bound.hi <= 1.0 + 1e-8);

    // whole space: identity
    LambdaReport c = lambda_proj(make_subspace(l22, Mat::Identity(2, 2)));
    CHECK(c.bound.lo == 1.0);
    CHECK(c.bound.hi == 1.0);
}

TEST_CASE("lambda_proj_max_norm_diagonal_vs_grid_oracle") {
    // projections onto span{(1,1)} in the max-norm plane, oracle over kernels
    Space li2 = make_lp(2, kInf);
    Mat d(2, 1);
    d << 1, 1;
    LambdaReport rep = lambda_proj(make_subspace(li2, d));

    double oracle = kInf;
    const int M = 2000;
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < M; ++i) {
        double t = pi * i / M;
        Vec u(2);
        u << std::cos(t), std::sin(t);  // kernel direction
        Vec w(2);
        w << -u(1), u(0);  // functional vanishing on u
        double den = w(0) + w(1);
        if (std::abs(den) < 1e-6) continue;
        w /= den;  // now w . (1,1) = 1
        // P = (1,1)^T w^T ; max-norm operator norm = max row l1 = |w1|+|w2|
        oracle = std::min(oracle, w.cwiseAbs().sum());
    }
    CHECK(rep.bound.lo <= oracle + 1e-9);
    CHECK(rep.bound.hi <= oracle + 5e-3);
    CHECK(rep.bound.hi >= oracle - 1e-9);  // oracle is the true minimum here
}

TEST_CASE("prop53_cases") {
    // equal pair: everything collapses to zero
    Lines L = taxicab_lines();
    Prop53Report eq = prop53_check(L.y1, L.y1);
    CHECK(eq.applicable);
    CHECK(eq.ok);

    // nearby lines (a = 0.1): bound holds
    Space l12 = make_lp(2, 1.0);
    Mat b1(2, 1), b2(2, 1);
    b1 << 1, 0;
    b2 << 1, 0.1;
    Prop53Report near = prop53_check(make_subspace(l12, b1), make_subspace(l12, b2));
    CHECK(near.applicable);
    CHECK(near.ok);
    CHECK(near.omega_hi * near.lambda_hi < 1.0);

    // far lines (slope 1): Omega = 1, precondition fails
    Prop53Report far = prop53_check(L.y1, L.y3);
    CHECK(!far.applicable);
    CHECK(far.note.find("skipped") != std::string::npos);
}

TEST_CASE("annihilator_monotonicity_via_adjoint") {
    Lines L = taxicab_lines();
    auto dual_up = r0_adjoint_dual_upper(L.y1, L.y2);
    REQUIRE(dual_up.has_value());
    OperatorGapReport primal = r0_bounds(L.y1, L.y2);
    // the adjoint of the primal witness certifies the dual pair at the same level
    CHECK(*dual_up <= primal.bound.hi + 1e-6);
    GapReport dual_lower = theta0(annihilator(L.y2), annihilator(L.y1));
    CHECK(*dual_up >= dual_lower.bound.lo - 1e-9);
}
