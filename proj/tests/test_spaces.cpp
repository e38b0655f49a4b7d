// Norm-descriptor algebra tests. Expected values come from independent
// oracles implemented inline (golden-section minimization, vertex
// enumeration by hand, closed-form duals) and are frozen here.
#include <cmath>
#include <vector>

#include "rng.hpp"
#include "space.hpp"
#include "test_harness.hpp"

using namespace gapkit;

namespace {

// Golden-section minimizer for convex 1-D functions.
double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 240) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

std::vector<Space> sample_spaces() {
    Vec w = v3(2.0, 0.5, 1.0);
    Rng rng(42);
    Mat P = rng.gaussian_matrix(3, 2);
    P(0, 0) += 3.0;  // keep well-conditioned
    P(1, 1) += 3.0;
    Mat F(4, 2);
    F << 1.0, 0.0, 0.0, 1.0, 0.7, 0.7, -0.4, 0.9;
    Mat K = v3(1.0, 1.0, 1.0);
    Mat rot(2, 2);
    rot << 0.8, -0.6, 0.6, 0.8;
    return {
        make_lp(3, 1.0),
        make_lp(4, 2.0),
        make_lp(3, kInf),
        make_lp(3, 3.0),
        make_weighted_lp(1.0, w),
        make_weighted_lp(2.5, w),
        make_weighted_lp(kInf, w),
        make_direct_sum(1.0, {make_lp(2, 2.0), make_lp(2, kInf)}),
        make_direct_sum(kInf, {make_lp(2, 1.0), make_lp(2, 3.0)}),
        make_quotient(make_lp(3, 1.0), K),
        make_quotient(make_lp(3, kInf), K),
        make_quotient(make_lp(3, 2.0), K),
        make_pullback(make_lp(3, kInf), P),
        make_max_functionals(F),
        make_max_of({make_lp(2, 1.0), make_pullback(make_lp(2, kInf), rot)}),
    };
}

}  // namespace

TEST_CASE(lp_norm_closed_forms) {
    Vec x = v3(1.0, -2.0, 2.0);
    CHECK_NEAR(norm(make_lp(3, 1.0), x), 5.0, 1e-15);
    CHECK_NEAR(norm(make_lp(3, 2.0), x), 3.0, 1e-15);
    CHECK_NEAR(norm(make_lp(3, kInf), x), 2.0, 1e-15);
    CHECK_NEAR(norm(make_lp(3, 3.0), x), std::cbrt(17.0), 1e-12);

    Vec w = v3(2.0, 0.5, 1.0);
    CHECK_NEAR(norm(make_weighted_lp(1.0, w), x), 2.0 + 1.0 + 2.0, 1e-15);
    CHECK_NEAR(norm(make_weighted_lp(2.0, w), x), std::sqrt(2.0 + 2.0 + 4.0), 1e-15);
    CHECK_NEAR(norm(make_weighted_lp(kInf, w), x), 2.0, 1e-15);
    // direct sum: ||(1,-2)||_2 = sqrt5, ||(2)||_inf = 2; 1-sum = sqrt5+2
    Space ds = make_direct_sum(1.0, {make_lp(2, 2.0), make_lp(1, kInf)});
    CHECK_NEAR(norm(ds, x), std::sqrt(5.0) + 2.0, 1e-15);
}

TEST_CASE(weighted_l1_dual_norm_oracle) {
    // Ball vertices of weighted l1 are +-e_i/w_i; dual norm is the max of
    // f over those vertices. Computed by hand and checked against dual_of.
    Vec w = v3(2.0, 0.5, 1.0);
    Space s = make_weighted_lp(1.0, w);
    Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        Vec f = rng.gaussian_vector(3);
        double oracle = 0.0;
        for (int i = 0; i < 3; ++i) oracle = std::max(oracle, std::fabs(f(i)) / w(i));
        CHECK_NEAR(dual_norm(s, f), oracle, 1e-12);
    }
    // and the other direction: dual of weighted l_inf is weighted l1(1/w)
    Space si = make_weighted_lp(kInf, w);
    for (int rep = 0; rep < 25; ++rep) {
        Vec f = rng.gaussian_vector(3);
        double oracle = 0.0;
        // brute force over the 8 sign-vertices x_i = s_i / w_i
        for (int mask = 0; mask < 8; ++mask) {
            double val = 0;
            for (int i = 0; i < 3; ++i) val += f(i) * ((mask >> i) & 1 ? 1.0 : -1.0) / w(i);
            oracle = std::max(oracle, std::fabs(val));
        }
        CHECK_NEAR(dual_norm(si, f), oracle, 1e-12);
    }
}

TEST_CASE(quotient_norm_1d_oracle) {
    // Quotient of a 3-dim space by a line; the quotient norm is a 1-D convex
    // minimization solved independently by golden section.
    Mat K = v3(1.0, 1.0, 1.0);
    Rng rng(11);
    for (double p : {1.0, 2.0, kInf, 4.0}) {
        Space par = make_lp(3, p);
        Space q = make_quotient(par, K);
        CHECK(q->dim == 2);
        for (int rep = 0; rep < 12; ++rep) {
            Vec c = rng.gaussian_vector(2);
            Vec lc = q->lift * c;
            auto f = [&](double t) { return norm(par, lc - t * K.col(0)); };
            double T = 2.0 * norm(par, lc) / norm(par, K.col(0)) + 1.0;
            double oracle = golden_min(f, -T, T);
            Bound b = norm_enclosure(q, c);
            CHECK_MSG(b.lo <= oracle + 1e-7 && oracle <= b.hi + 1e-7,
                      "p=%g oracle=%.12g enclosure=[%.12g,%.12g]", p, oracle, b.lo, b.hi);
            if (p == 4.0)
                CHECK_MSG(b.width() <= 1e-3, "descent enclosure too wide: %.3g", b.width());
            else
                CHECK_MSG(b.width() <= 1e-6, "enclosure too wide: %.3g", b.width());
        }
    }
}

TEST_CASE(norming_functionals_achieve_norm) {
    Rng rng(13);
    for (auto& s : sample_spaces()) {
        if (s->kind == NormKind::Quotient && !s->euclid) continue;  // subgradient pick may undershoot at kinks
        for (int rep = 0; rep < 10; ++rep) {
            Vec x = rng.gaussian_vector(s->dim);
            double nx = norm(s, x);
            Vec f = norming_functional(s, x);
            CHECK_NEAR(f.dot(x), nx, 1e-8 * (1 + nx));
            CHECK_MSG(dual_norm(s, f) <= 1.0 + 1e-7, "dual norm %.17g > 1", dual_norm(s, f));
        }
    }
}

TEST_CASE(duality_pairing_inequality) {
    Rng rng(17);
    for (auto& s : sample_spaces()) {
        Space d = dual_of(s);
        for (int rep = 0; rep < 10; ++rep) {
            Vec x = rng.gaussian_vector(s->dim);
            Vec f = rng.gaussian_vector(s->dim);
            double lhs = std::fabs(f.dot(x));
            double rhs = norm(d, f) * norm(s, x);
            CHECK_MSG(lhs <= rhs * (1 + 1e-9) + 1e-12, "pairing violated: %.17g > %.17g", lhs, rhs);
        }
    }
}

TEST_CASE(bidual_recovers_norm) {
    Rng rng(23);
    for (auto& s : sample_spaces()) {
        Space dd = dual_of(dual_of(s));
        CHECK(dd->dim == s->dim);
        for (int rep = 0; rep < 8; ++rep) {
            Vec x = rng.gaussian_vector(s->dim);
            double a = norm(s, x), b = norm(dd, x);
            CHECK_MSG(std::fabs(a - b) <= 1e-7 * (1 + a), "bidual mismatch %.17g vs %.17g", a, b);
        }
    }
}

TEST_CASE(equivalence_constants_hold) {
    Rng rng(29);
    for (auto& s : sample_spaces()) {
        CHECK(s->c_lo > 0 && s->c_hi >= s->c_lo);
        for (int rep = 0; rep < 25; ++rep) {
            Vec x = rng.gaussian_vector(s->dim);
            double nx = norm(s, x), e = x.norm();
            CHECK_MSG(nx >= s->c_lo * e - 1e-9, "c_lo violated: %.17g < %.17g", nx, s->c_lo * e);
            CHECK_MSG(nx <= s->c_hi * e + 1e-9, "c_hi violated: %.17g > %.17g", nx, s->c_hi * e);
        }
    }
}

TEST_CASE(analysis_flags) {
    CHECK(is_euclidean(make_lp(3, 2.0)));
    CHECK(is_euclidean(make_weighted_lp(2.0, v3(1, 2, 3))));
    CHECK(is_euclidean(make_direct_sum(2.0, {make_lp(2, 2.0), make_lp(1, 2.0)})));
    CHECK(is_euclidean(make_quotient(make_lp(3, 2.0), v3(1, 1, 1))));
    CHECK(!is_euclidean(make_lp(3, 1.0)));
    CHECK(make_lp(3, 1.0)->polyhedral);
    CHECK(make_lp(3, kInf)->polyhedral);
    CHECK(!make_lp(3, 2.0)->polyhedral);
    CHECK(make_max_functionals(Mat::Identity(3, 3))->polyhedral);
    CHECK(make_quotient(make_lp(3, 1.0), v3(1, 1, 1))->polyhedral);
    // Euclidean quotient norm equals the projected Euclidean length.
    Space q = make_quotient(make_lp(3, 2.0), v3(0, 0, 1));
    Vec c(2);
    c << 3.0, 4.0;
    CHECK_NEAR(norm(q, c), 5.0, 1e-9);
}

TEST_CASE(ball_vertex_span_counts_and_support) {
    // Hand-counted vertex sets.
    auto v1 = ball_vertex_span(make_lp(3, 1.0));
    CHECK(v1 && v1->size() == 6);
    auto vi = ball_vertex_span(make_lp(3, kInf));
    CHECK(vi && vi->size() == 8);
    auto vds = ball_vertex_span(make_direct_sum(1.0, {make_lp(1, kInf), make_lp(2, 1.0)}));
    CHECK(vds && vds->size() == 6);
    Mat F(3, 2);  // hexagon: max(|x|, |y|, |x+y|/?); rows x, y, 0.5(x+y)*2
    F << 1, 0, 0, 1, 1, 1;
    auto vh = ball_vertex_span(make_max_functionals(F));
    CHECK_MSG(vh && vh->size() == 6, "hexagon: got %d vertices", vh ? int(vh->size()) : -1);

    // Support function of the vertex span equals the dual norm; the facet
    // H-representation reproduces the primal norm.
    Rng rng(31);
    for (auto& s : sample_spaces()) {
        if (!s->polyhedral) continue;
        auto verts = ball_vertex_span(s);
        auto facs = ball_facet_normals(s);
        CHECK(verts.has_value() && facs.has_value());
        double maxn = 0;
        for (auto& v : *verts) {
            double nv = norm(s, v);
            CHECK_MSG(nv <= 1 + 1e-8, "vertex outside ball: %.17g", nv);
            maxn = std::max(maxn, nv);
        }
        CHECK_NEAR(maxn, 1.0, 1e-8);
        Space d = dual_of(s);
        for (int rep = 0; rep < 8; ++rep) {
            Vec f = rng.gaussian_vector(s->dim);
            double sup = 0;
            for (auto& v : *verts) sup = std::max(sup, f.dot(v));
            CHECK_NEAR(sup, norm(d, f), 1e-7 * (1 + sup));
            Vec x = rng.gaussian_vector(s->dim);
            double hsup = 0;
            for (auto& g : *facs) hsup = std::max(hsup, g.dot(x));
            CHECK_NEAR(hsup, norm(s, x), 1e-7 * (1 + hsup));
        }
    }
}

TEST_CASE(encode_norm_le_matches_norm) {
    Rng rng(37);
    for (auto& s : sample_spaces()) {
        if (!s->polyhedral) continue;
        for (int rep = 0; rep < 4; ++rep) {
            Vec x0 = rng.gaussian_vector(s->dim);
            // min t  s.t. ||x0||_s <= t  ==> t = ||x0||
            LinearProgram lp;
            int t = lp.add_var(1.0, true);
            encode_norm_le(lp, s, vec_to_exprs(x0), LinExpr::var(t));
            auto r = solve_lp(lp);
            CHECK(r.ok());
            CHECK_NEAR(r.value, norm(s, x0), 1e-8 * (1 + r.value));
            // min_a ||x0 - a d||_s vs golden section
            Vec dvec = rng.gaussian_vector(s->dim);
            AffineMinResult am = min_norm_over_affine(s, x0, dvec);
            auto f = [&](double a) { return norm(s, x0 - a * dvec); };
            double T = 2 * norm(s, x0) / norm(s, dvec) + 1;
            double oracle = golden_min(f, -T, T);
            CHECK_MSG(am.bound.lo <= oracle + 1e-7 && oracle <= am.bound.hi + 1e-7,
                      "line-min oracle %.12g not in [%.12g,%.12g]", oracle, am.bound.lo, am.bound.hi);
        }
    }
}

TEST_CASE(affine_min_descent_certificates) {
    // Smooth non-Euclidean parent: descent plus a dual certificate must
    // bracket the golden-section oracle tightly.
    Space s = make_lp(3, 3.0);
    Rng rng(41);
    for (int rep = 0; rep < 8; ++rep) {
        Vec x0 = rng.gaussian_vector(3);
        Vec dvec = rng.unit_vector(3);
        AffineMinResult am = min_norm_over_affine(s, x0, dvec);
        auto f = [&](double a) { return norm(s, x0 - a * dvec); };
        double T = 2 * norm(s, x0) + 1;
        double oracle = golden_min(f, -T, T);
        CHECK_MSG(am.bound.lo <= oracle + 1e-9, "lower bound unsound: %.12g > %.12g", am.bound.lo, oracle);
        CHECK_MSG(am.bound.hi >= oracle - 1e-9, "upper bound unsound: %.12g < %.12g", am.bound.hi, oracle);
        CHECK_MSG(am.bound.width() <= 2e-4, "certificate gap too wide: %.3g", am.bound.width());
    }
}

TEST_CASE(json_round_trip_and_hash) {
    Rng rng(43);
    for (auto& s : sample_spaces()) {
        std::string js = space_to_json(s);
        Space t = parse_space_json(js);
        CHECK(t->dim == s->dim);
        for (int rep = 0; rep < 6; ++rep) {
            Vec x = rng.gaussian_vector(s->dim);
            CHECK_NEAR(norm(t, x), norm(s, x), 1e-9 * (1 + norm(s, x)));
        }
        CHECK(space_hash(s) == space_hash(t));
    }
    CHECK(space_hash(make_lp(2, 1.0)) != space_hash(make_lp(2, kInf)));
    CHECK(space_hash(make_lp(2, 1.0)) != space_hash(make_lp(3, 1.0)));
    // "inf" round-trips; dual type is parse-only sugar.
    Space d = parse_space_json(R"({"type":"dual","parent":{"type":"lp","dim":2,"p":1}})");
    Vec x(2);
    x << 1, -2;
    CHECK_NEAR(norm(d, x), 2.0, 1e-15);  // dual of l1 is linf
}

TEST_MAIN()
