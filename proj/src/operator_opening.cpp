#include "operator_opening.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace gapkit {

namespace {

double sigma_min_of(const Mat& A) {
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

std::string opnorm_route_name(const Space& s) {
    if (is_euclidean(s)) return "singular-value exact";
    if (s->polyhedral) return "vertex-enumeration exact";
    return "net/equivalence certified upper";
}

// Fast (uncertified) operator-norm estimate used inside searches; winners are
// re-certified through op_norm afterwards.
struct OpProxy {
    Space amb;
    bool euclid = false;
    Mat G, Rinv;
    std::vector<Vec> pts;

    double operator()(const Mat& M) const {
        if (euclid) {
            Eigen::JacobiSVD<Mat> svd(G * (M * Rinv));
            return svd.singularValues()(0);
        }
        double m = 0.0;
        for (const Vec& p : pts) m = std::max(m, norm(amb, M * p));
        return m;
    }
};

OpProxy build_proxy(const Space& amb, std::uint64_t seed) {
    OpProxy px;
    px.amb = amb;
    if (is_euclidean(amb)) {
        px.euclid = true;
        px.G = *amb->euclid;
        Eigen::HouseholderQR<Mat> qr(px.G);
        Mat R = qr.matrixQR().topRows(px.G.cols()).triangularView<Eigen::Upper>();
        px.Rinv = R.inverse();
        return px;
    }
    if (amb->polyhedral) {
        if (auto verts = ball_vertex_span(amb, 1200000)) {
            px.pts = *verts;
            return px;
        }
    }
    Rng rng(seed ^ 0xa5a5a5a5ULL);
    for (int i = 0; i < 160; ++i) {
        Vec x = rng.unit_vector(amb->dim);
        double nx = norm(amb, x);
        if (nx > 1e-14) px.pts.push_back(x / nx);
    }
    return px;
}

// Derivative-free coordinate descent with shrinking radius.
template <typename F>
double pattern_min(F f, Vec& th, double radius, double radius_min, long max_eval) {
    double best = f(th);
    double r = radius;
    while (r > radius_min && max_eval > 0) {
        bool improved = false;
        for (int i = 0; i < th.size() && max_eval > 0; ++i) {
            for (double s : {1.0, -1.0}) {
                Vec cand = th;
                cand(i) += s * r;
                double v = f(cand);
                --max_eval;
                if (v < best - 1e-15) {
                    best = v;
                    th = cand;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) r *= 0.5;
    }
    return best;
}

// Projector onto span(B) orthogonal in the euclid geometry when available.
Mat projector_onto(const Space& amb, const Mat& B) {
    const int n = amb->dim;
    if (B.cols() == 0) return Mat::Zero(n, n);
    if (amb->euclid) {
        Mat M = (*amb->euclid) * B;
        return B * (M.transpose() * M).inverse() * M.transpose() * (*amb->euclid);
    }
    return B * B.transpose();  // basis columns are orthonormal
}

struct Candidate {
    double value = kInf;  // certified upper on ||C - I||
    Mat C;
    std::string route;
};

}  // namespace

OperatorGapReport r0_bounds(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    const Space& amb = Y.ambient;
    GapReport th = theta0(Y, Z, cfg);  // validates the common ambient
    double lower = std::min(1.0, th.bound.lo);
    const int n = amb->dim;
    const int k = Y.k();

    OperatorGapReport rep;
    if (k == 0 && Z.k() == 0) {
        rep.bound = Bound(0.0, 0.0);
        rep.witness = Mat::Identity(n, n);
        rep.upper_route = "identity";
        return rep;
    }
    if (k != Z.k()) {
        rep.bound = Bound(lower, 1.0);
        rep.upper_route = "dimension mismatch: trivial cap";
        return rep;
    }

    OpProxy proxy = build_proxy(amb, cfg.seed);
    std::vector<Candidate> cands;

    // Projection-difference route: C = I + (P_Z - P_Y) maps Y into Z and is
    // invertible whenever the difference has norm < 1.
    {
        Mat D = projector_onto(amb, Z.basis) - projector_onto(amb, Y.basis);
        Bound nb = op_norm(make_linear_map(amb, amb, D), cfg);
        Mat C = Mat::Identity(n, n) + D;
        if (nb.hi < 1.0 && sigma_min_of(C) > 1e-8)
            cands.push_back({nb.hi, C, "projection difference (" + opnorm_route_name(amb) + ")"});
    }

    // Multistart search over C = [B_Z M | W + E] [B_Y W]^{-1}.
    {
        const Mat BY = Y.basis, BZ = Z.basis;
        const Mat W = complement_basis(Y);
        Mat T0(n, n);
        T0.leftCols(k) = BY;
        T0.rightCols(n - k) = W;
        const Mat Tinv = T0.inverse();
        const Mat M0 = BZ.transpose() * BY;
        const int pM = k * k, pE = n * (n - k);

        auto assemble = [&](const Vec& thv) {
            Mat M(k, k), E(n, n - k);
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < k; ++i) M(i, j) = thv(j * k + i);
            for (int j = 0; j < n - k; ++j)
                for (int i = 0; i < n; ++i) E(i, j) = thv(pM + j * n + i);
            Mat left(n, n);
            left.leftCols(k) = BZ * M;
            left.rightCols(n - k) = W + E;
            return Mat(left * Tinv);
        };
        auto objective = [&](const Vec& thv) {
            Mat M(k, k);
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < k; ++i) M(i, j) = thv(j * k + i);
            double pen = sigma_min_of(M) < 1e-7 ? 5.0 : 0.0;
            Mat C = assemble(thv);
            return proxy(C - Mat::Identity(n, n)) + pen;
        };

        const int starts =
            static_cast<int>(std::clamp<long>(cfg.budget / 3125, 8, 64));
        Rng rng(cfg.seed);
        Vec best_th;
        double best_val = kInf;
        for (int s = 0; s < starts; ++s) {
            Vec thv = Vec::Zero(pM + pE);
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < k; ++i) thv(j * k + i) = M0(i, j);
            if (s > 0) {
                for (int i = 0; i < pM; ++i) thv(i) += 0.35 * rng.normal();
                for (int i = 0; i < pE; ++i) thv(pM + i) = 0.2 * rng.normal();
            }
            double v = pattern_min(objective, thv, 0.25, 2e-4, 900);
            if (v < best_val) {
                best_val = v;
                best_th = thv;
            }
        }
        if (best_th.size()) {
            Mat C = assemble(best_th);
            if (sigma_min_of(C) > 1e-8) {
                Bound nb = op_norm(make_linear_map(amb, amb, Mat(C - Mat::Identity(n, n))), cfg);
                cands.push_back({nb.hi, C, "multistart (" + opnorm_route_name(amb) + ")"});
            }
        }
    }

    Candidate best;
    for (const Candidate& c : cands)
        if (c.value < best.value) best = c;

    double upper = std::min(1.0, best.value);
    rep.bound = Bound(std::min(lower, upper), upper);
    if (best.value <= 1.0 + 1e-12 && best.C.size()) {
        rep.witness = best.C;
        rep.upper_route = best.route;
    } else {
        rep.upper_route = "trivial cap";
    }
    return rep;
}

OperatorGapReport r_bounds(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    OperatorGapReport a = r0_bounds(Y, Z, cfg);
    OperatorGapReport b = r0_bounds(Z, Y, cfg);
    OperatorGapReport rep;
    rep.bound = Bound(std::max(a.bound.lo, b.bound.lo), std::max(a.bound.hi, b.bound.hi));
    const OperatorGapReport& w = a.bound.hi >= b.bound.hi ? a : b;
    rep.witness = w.witness;
    rep.upper_route = w.upper_route;
    return rep;
}

double dop_metric(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    return std::log1p(r_bounds(Y, Z, cfg).bound.hi);
}

InverseBoundReport inverse_bound_check(const Space& ambient, const Mat& C,
                                       const ComputeCfg& cfg) {
    InverseBoundReport rep;
    const int n = ambient->dim;
    if (C.rows() != n || C.cols() != n)
        throw std::invalid_argument("inverse_bound_check: matrix shape mismatch");
    rep.u = op_norm(make_linear_map(ambient, ambient, Mat(C - Mat::Identity(n, n))), cfg).hi;
    if (rep.u >= 1.0 || sigma_min_of(C) <= 1e-10) return rep;  // inapplicable
    Mat Cinv = C.inverse();
    rep.lhs =
        op_norm(make_linear_map(ambient, ambient, Mat(Cinv - Mat::Identity(n, n))), cfg).hi;
    rep.rhs = rep.u / (1.0 - rep.u) + cfg.tol;
    rep.ok = rep.lhs <= rep.rhs;
    rep.applicable = true;
    return rep;
}

InverseBoundReport inverse_bound_check(const Subspace& Y, const Subspace& Z,
                                       const ComputeCfg& cfg) {
    OperatorGapReport r0 = r0_bounds(Y, Z, cfg);
    InverseBoundReport rep;
    if (!r0.witness || r0.bound.hi >= 1.0) {
        rep.u = r0.bound.hi;
        return rep;
    }
    return inverse_bound_check(Y.ambient, *r0.witness, cfg);
}

LambdaReport lambda_proj(const Subspace& Y, const ComputeCfg& cfg) {
    const Space& amb = Y.ambient;
    const int n = amb->dim;
    const int k = Y.k();
    LambdaReport rep;
    rep.route = opnorm_route_name(amb);
    if (k == 0) {  // only the zero map projects onto {0}
        rep.bound = Bound(0.0, 0.0);
        rep.witness_projection = Mat::Zero(n, n);
        return rep;
    }
    if (k == n) {
        rep.bound = Bound(1.0, 1.0);
        rep.witness_projection = Mat::Identity(n, n);
        rep.route = "identity";
        return rep;
    }

    // Projections onto Y: P = B_Y (B_Y^T + Lam N^T) with N spanning the
    // Euclidean complement; Lam is the kernel-choice parameter.
    const Mat BY = Y.basis;
    const Mat N = complement_basis(Y);
    OpProxy proxy = build_proxy(amb, cfg.seed);
    auto assemble = [&](const Vec& thv) {
        Mat Lam(k, n - k);
        for (int j = 0; j < n - k; ++j)
            for (int i = 0; i < k; ++i) Lam(i, j) = thv(j * k + i);
        return Mat(BY * (BY.transpose() + Lam * N.transpose()));
    };
    auto objective = [&](const Vec& thv) { return proxy(assemble(thv)); };

    const int starts = static_cast<int>(std::clamp<long>(cfg.budget / 6250, 4, 32));
    Rng rng(cfg.seed ^ 0x5bd1e995ULL);
    Vec best_th = Vec::Zero(k * (n - k));
    double best_val = kInf;
    for (int s = 0; s < starts; ++s) {
        Vec thv = Vec::Zero(k * (n - k));
        if (s > 0)
            for (int i = 0; i < thv.size(); ++i) thv(i) = 0.5 * rng.normal();
        double v = pattern_min(objective, thv, 0.25, 2e-4, 900);
        if (v < best_val) {
            best_val = v;
            best_th = thv;
        }
    }
    Mat P = assemble(best_th);
    double up = op_norm(make_linear_map(amb, amb, P), cfg).hi;
    rep.bound = Bound(1.0, std::max(1.0, up));
    rep.witness_projection = P;
    return rep;
}

Prop53Report prop53_check(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    Prop53Report rep;
    rep.omega_hi = omega(Z, Y, cfg).bound.hi;
    rep.lambda_hi = lambda_proj(Y, cfg).bound.hi;
    const double prod = rep.omega_hi * rep.lambda_hi;
    if (prod >= 1.0) {
        rep.note = "skipped: Omega(Z,Y) * lambda(Y,X) >= 1";
        return rep;
    }
    rep.applicable = true;
    rep.r0_hi = r0_bounds(Y, Z, cfg).bound.hi;
    rep.rhs = rep.lambda_hi * rep.omega_hi * (1.0 + rep.lambda_hi - prod) / (1.0 - prod) +
              cfg.tol;
    rep.ok = rep.r0_hi <= rep.rhs;
    rep.note = rep.ok ? "bound holds" : "bound violated";
    return rep;
}

std::optional<double> r0_adjoint_dual_upper(const Subspace& Y, const Subspace& Z,
                                            const ComputeCfg& cfg) {
    OperatorGapReport r0 = r0_bounds(Y, Z, cfg);
    if (!r0.witness) return std::nullopt;
    Space dual = dual_of(Y.ambient);
    const int n = Y.ambient->dim;
    Mat D = r0.witness->transpose() - Mat::Identity(n, n);
    return op_norm(make_linear_map(dual, dual, D), cfg).hi;
}

}  // namespace gapkit
