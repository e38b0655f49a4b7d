#include "openings.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace gapkit {

namespace {

// Half-width claimed for values assembled from exact LP / vertex enumeration.
constexpr double kExactPad = 4.5e-10;
// Half-width for closed-form singular-value routes.
constexpr double kSpectralPad = 1e-11;

void require_same_ambient(const Subspace& A, const Subspace& B, const char* op) {
    if (A.ambient == B.ambient) return;
    if (space_hash(A.ambient) == space_hash(B.ambient)) return;
    throw std::invalid_argument(std::string(op) + ": ambient space mismatch");
}

double effective_mesh(const ComputeCfg& cfg, int k) {
    if (!std::isnan(cfg.mesh)) return cfg.mesh;
    if (k <= 2) return 5e-3;
    if (k == 3) return 2e-2;
    return 0.15;
}

GapMethod method_max(GapMethod a, GapMethod b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

Vec unitize(const Space& amb, const Vec& v) {
    double n = norm(amb, v);
    if (n <= 0) throw std::invalid_argument("unitize: zero vector");
    return v / n;
}

Bound clamp01(const Bound& b) { return b.clamp(0.0, 1.0); }

// Orthonormalization of L*B (Euclidean coordinates of the inner-product
// norm); R recovers coefficient vectors: y = B R^{-1} v has |L y| = |v|.
void g_orth(const Mat& L, const Mat& B, Mat& Q, Mat& R) {
    Mat A = L * B;
    Eigen::HouseholderQR<Mat> qr(A);
    Q = qr.householderQ() * Mat::Identity(A.rows(), A.cols());
    R = Q.transpose() * A;
}

// Smallest singular value of Q_Z^T Q_Y as a map out of R^{k_Y} (zero when
// k_Y exceeds k_Z), together with a minimizing unit coefficient vector.
void min_alignment(const Mat& QY, const Mat& QZ, double& sigma, Vec& v) {
    const int kY = static_cast<int>(QY.cols());
    const int kZ = static_cast<int>(QZ.cols());
    Mat M = QZ.transpose() * QY;
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    v = svd.matrixV().col(kY - 1);
    sigma = (kY > kZ) ? 0.0 : svd.singularValues()(std::min(kY, kZ) - 1);
}

struct SweepResult {
    Bound bound{0.0, 0.0};
    Vec best;  // ambient point
    double mesh = 0.0;
};

// Supremum of a 1-Lipschitz certified quantity over S(Y) via a covering net,
// with local refinement of the achieved lower bound.
template <typename F>
SweepResult sup_net(const Subspace& Y, const ComputeCfg& cfg, bool polish, F eval) {
    SphereNet net = sphere_net(Y, effective_mesh(cfg, Y.k()), cfg.budget);
    double lo = 0.0, hi = 0.0;
    Vec best_param;
    for (auto& p : net.points) {
        Bound b = eval(p);
        hi = std::max(hi, b.hi);
        if (b.lo >= lo) {
            lo = b.lo;
            best_param = p;
        }
    }
    Vec best = best_param;
    if (polish && Y.k() >= 2) {
        Vec w = Y.basis.transpose() * best_param;  // coefficients (basis orthonormal)
        double radius = net.mesh;
        int evals = 0;
        while (radius > 1e-4 && evals < 64) {
            bool improved = false;
            for (int i = 0; i < Y.k() && evals < 64; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Vec cand = w;
                    cand(i) += sgn * radius;
                    Vec y = unitize(Y.ambient, Y.basis * cand);
                    Bound b = eval(y);
                    ++evals;
                    if (b.lo > lo) {
                        lo = b.lo;
                        w = cand;
                        best = y;
                        improved = true;
                    }
                }
            }
            if (!improved) radius *= 0.5;
        }
    }
    SweepResult r;
    r.bound = Bound(std::min(lo, hi + net.mesh), hi + net.mesh);
    r.best = best;
    r.mesh = net.mesh;
    return r;
}

// Infimum version (used by the inclination).
template <typename F>
SweepResult inf_net(const Subspace& Y, const ComputeCfg& cfg, F eval) {
    SphereNet net = sphere_net(Y, effective_mesh(cfg, Y.k()), cfg.budget);
    double lo = kInf, hi = kInf;
    Vec best_param;
    for (auto& p : net.points) {
        Bound b = eval(p);
        lo = std::min(lo, b.lo);
        if (b.hi <= hi) {
            hi = b.hi;
            best_param = p;
        }
    }
    Vec best = best_param;
    if (Y.k() >= 2) {
        Vec w = Y.basis.transpose() * best_param;
        double radius = net.mesh;
        int evals = 0;
        while (radius > 1e-4 && evals < 64) {
            bool improved = false;
            for (int i = 0; i < Y.k() && evals < 64; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Vec cand = w;
                    cand(i) += sgn * radius;
                    Vec y = unitize(Y.ambient, Y.basis * cand);
                    Bound b = eval(y);
                    ++evals;
                    if (b.hi < hi) {
                        hi = b.hi;
                        w = cand;
                        best = y;
                        improved = true;
                    }
                }
            }
            if (!improved) radius *= 0.5;
        }
    }
    SweepResult r;
    r.bound = Bound(std::max(0.0, lo - net.mesh), std::max(hi, std::max(0.0, lo - net.mesh)));
    r.best = best;
    r.mesh = net.mesh;
    return r;
}

// Deterministic sampled supremum for dimensions past the net cap.
template <typename F>
SweepResult sup_sampled(const Subspace& Y, const ComputeCfg& cfg, F eval) {
    Rng rng(cfg.seed);
    double lo = 0.0;
    Vec best;
    int n_samples = 256;
    for (int i = 0; i < n_samples; ++i) {
        Vec y = unitize(Y.ambient, Y.basis * rng.unit_vector(Y.k()));
        Bound b = eval(y);
        if (b.lo >= lo) {
            lo = b.lo;
            best = y;
        }
    }
    Vec w = Y.basis.transpose() * best;
    double radius = 0.3;
    int evals = 0;
    while (radius > 1e-5 && evals < 128) {
        bool improved = false;
        for (int i = 0; i < Y.k() && evals < 128; ++i) {
            for (double sgn : {1.0, -1.0}) {
                Vec cand = w;
                cand(i) += sgn * radius;
                Vec y = unitize(Y.ambient, Y.basis * cand);
                Bound b = eval(y);
                ++evals;
                if (b.lo > lo) {
                    lo = b.lo;
                    w = cand;
                    best = y;
                    improved = true;
                }
            }
        }
        if (!improved) radius *= 0.5;
    }
    SweepResult r;
    r.bound = Bound(lo, 1.0);
    r.best = best;
    return r;
}

GapReport one_sided_sup(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg,
                        bool to_ball);
GapReport omega_side(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg);

GapReport combine_max(const GapReport& a, const GapReport& b) {
    GapReport rep;
    rep.bound = Bound(std::max(a.bound.lo, b.bound.lo), std::max(a.bound.hi, b.bound.hi));
    rep.method = method_max(a.method, b.method);
    if (a.mesh || b.mesh) rep.mesh = std::max(a.mesh.value_or(0.0), b.mesh.value_or(0.0));
    rep.witness = (a.bound.lo >= b.bound.lo) ? a.witness : b.witness;
    return rep;
}

// Shared implementation of theta0 (to_ball = false) and the one-sided ball
// opening (to_ball = true): sup over S(Y) of dist(y, Z) resp. dist(y, B(Z)).
GapReport one_sided_sup(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg,
                        bool to_ball) {
    const Space& amb = Y.ambient;
    GapReport rep;
    if (Y.k() == 0) {
        rep.bound = Bound(0.0, 0.0);
        return rep;
    }
    if (Z.k() == 0 && !to_ball) {
        rep.bound = Bound(1.0, 1.0);
        rep.witness = unitize(amb, Y.basis.col(0));
        return rep;
    }
    const bool force_net = cfg.force == ForceRoute::ForceNet;

    if (!force_net && is_euclidean(amb) && Z.k() > 0) {
        // dist(y, Z) = dist(y, B(Z)) = sqrt(1 - |P_Z y|^2) for unit y: both
        // reduce to the smallest alignment singular value.
        const Mat& L = *amb->euclid;
        Mat QY, RY, QZ, RZ;
        g_orth(L, Y.basis, QY, RY);
        g_orth(L, Z.basis, QZ, RZ);
        double sigma;
        Vec v;
        min_alignment(QY, QZ, sigma, v);
        double val = std::sqrt(std::max(0.0, 1.0 - sigma * sigma));
        rep.bound = clamp01(Bound(val - kSpectralPad, val + kSpectralPad));
        rep.method = GapMethod::SpectralExact;
        rep.witness = unitize(amb, Y.basis * RY.inverse() * v);
        return rep;
    }

    auto eval = [&](const Vec& y) -> Bound {
        return to_ball ? dist_to_ball(amb, y, Z, cfg.tol).bound
                       : dist_to_subspace(amb, y, Z, cfg.tol).bound;
    };

    if (!force_net && lp_encodable(amb)) {
        // dist(., Z) and dist(., B(Z)) are convex, so their supremum over the
        // ball of Y is attained at the induced ball's vertices, which lie on
        // S(Y) and coincide with the supremum over the sphere.
        auto verts = ball_vertex_span(induced_space(Y), cfg.budget);
        if (verts) {
            double val = 0.0;
            Vec best;
            for (auto& v : *verts) {
                Vec y = Y.basis * v;
                double d = eval(y).mid();
                if (d >= val) {
                    val = d;
                    best = y;
                }
            }
            rep.bound = clamp01(Bound(val - kExactPad, val + kExactPad));
            rep.method = GapMethod::PolyhedralExact;
            rep.witness = best;
            return rep;
        }
    }

    if (cfg.force == ForceRoute::ForceExact)
        throw std::runtime_error("exact route unavailable for this space/dimension");

    if (Y.k() <= 4) {
        SweepResult s = sup_net(Y, cfg, true, eval);
        rep.bound = clamp01(s.bound);
        rep.method = GapMethod::CertifiedNet;
        rep.mesh = s.mesh;
        rep.witness = s.best;
        return rep;
    }
    SweepResult s = sup_sampled(Y, cfg, eval);
    rep.bound = clamp01(s.bound);
    rep.method = GapMethod::Multistart;
    rep.witness = s.best;
    return rep;
}

GapReport omega_side(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    const Space& amb = Y.ambient;
    GapReport rep;
    const bool force_net = cfg.force == ForceRoute::ForceNet;

    if (!force_net && is_euclidean(amb)) {
        // dist(y, S(Z)) = sqrt(2 - 2 |P_Z y|) for unit y.
        const Mat& L = *amb->euclid;
        Mat QY, RY, QZ, RZ;
        g_orth(L, Y.basis, QY, RY);
        g_orth(L, Z.basis, QZ, RZ);
        double sigma;
        Vec v;
        min_alignment(QY, QZ, sigma, v);
        double val = std::sqrt(std::max(0.0, 2.0 - 2.0 * sigma));
        rep.bound = Bound(std::max(0.0, val - kSpectralPad), std::min(2.0, val + kSpectralPad));
        rep.method = GapMethod::SpectralExact;
        rep.witness = unitize(amb, Y.basis * RY.inverse() * v);
        return rep;
    }

    auto eval = [&](const Vec& y) -> Bound { return dist_to_sphere(amb, y, Z, cfg.tol).bound; };

    if (Y.k() == 1) {
        // S(Y) = {y, -y} and dist(., S(Z)) is symmetric: one evaluation.
        Vec y = unitize(amb, Y.basis.col(0));
        Bound b = eval(y);
        rep.witness = y;
        if (lp_encodable(amb)) {
            rep.bound = Bound(std::max(0.0, b.mid() - kExactPad),
                              std::min(2.0, b.mid() + kExactPad));
            rep.method = GapMethod::PolyhedralExact;
        } else {
            rep.bound = b.clamp(0.0, 2.0);
            rep.method = GapMethod::Multistart;
        }
        return rep;
    }

    if (amb->polyhedral && Y.k() <= 4 && !(cfg.force == ForceRoute::ForceExact)) {
        SweepResult s = sup_net(Y, cfg, false, eval);
        rep.bound = s.bound.clamp(0.0, 2.0);
        rep.method = GapMethod::CertifiedNet;
        rep.mesh = s.mesh;
        rep.witness = s.best;
        return rep;
    }

    if (cfg.force == ForceRoute::ForceExact)
        throw std::runtime_error("exact route unavailable for this space/dimension");

    // Sampled lower bound; upper bound from dist(y, S(Z)) <= 2 dist(y, Z).
    Rng rng(cfg.seed);
    double lo = 0.0;
    Vec best = unitize(amb, Y.basis.col(0));
    for (int i = 0; i < 128; ++i) {
        Vec y = unitize(amb, Y.basis * rng.unit_vector(Y.k()));
        Bound b = eval(y);
        if (b.lo >= lo) {
            lo = b.lo;
            best = y;
        }
    }
    GapReport t0 = one_sided_sup(Y, Z, cfg, false);
    double hi = std::min(2.0, 2.0 * t0.bound.hi);
    rep.bound = Bound(std::min(lo, hi), hi);
    rep.method = GapMethod::Multistart;
    rep.witness = best;
    return rep;
}

}  // namespace

const char* gap_method_name(GapMethod m) {
    switch (m) {
        case GapMethod::PolyhedralExact: return "PolyhedralExact";
        case GapMethod::SpectralExact: return "SpectralExact";
        case GapMethod::CertifiedNet: return "CertifiedNet";
        case GapMethod::Multistart: return "Multistart";
    }
    return "Unknown";
}

GapReport theta0(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    require_same_ambient(Y, Z, "theta0");
    return one_sided_sup(Y, Z, cfg, false);
}

GapReport theta(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    require_same_ambient(Y, Z, "theta");
    return combine_max(one_sided_sup(Y, Z, cfg, false), one_sided_sup(Z, Y, cfg, false));
}

GapReport omega(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    require_same_ambient(Y, Z, "omega");
    if (Y.k() == 0 || Z.k() == 0) return theta(Y, Z, cfg);
    return combine_max(omega_side(Y, Z, cfg), omega_side(Z, Y, cfg));
}

GapReport lambda_gap(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    require_same_ambient(Y, Z, "lambda_gap");
    if (Y.k() == 0 || Z.k() == 0) return theta(Y, Z, cfg);
    return combine_max(one_sided_sup(Y, Z, cfg, true), one_sided_sup(Z, Y, cfg, true));
}

GapReport inclination(const Subspace& Z, const Subspace& Y, const ComputeCfg& cfg) {
    require_same_ambient(Z, Y, "inclination");
    const Space& amb = Z.ambient;
    GapReport rep;
    if (Z.k() == 0) throw std::invalid_argument("inclination: Z must be nonzero");
    if (Y.k() == 0) {
        rep.bound = Bound(1.0, 1.0);
        rep.witness = unitize(amb, Z.basis.col(0));
        return rep;
    }
    Subspace inter = subspace_intersection(Z, Y);
    if (inter.k() > 0) {
        rep.bound = Bound(0.0, 0.0);
        rep.witness = unitize(amb, inter.basis.col(0));
        return rep;
    }
    const bool force_net = cfg.force == ForceRoute::ForceNet;

    if (!force_net && is_euclidean(amb)) {
        const Mat& L = *amb->euclid;
        Mat QZ, RZ, QY, RY;
        g_orth(L, Z.basis, QZ, RZ);
        g_orth(L, Y.basis, QY, RY);
        Mat M = QZ - QY * (QY.transpose() * QZ);
        Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
        double sigma = svd.singularValues()(Z.k() - 1);
        Vec v = svd.matrixV().col(Z.k() - 1);
        rep.bound = clamp01(Bound(sigma - kSpectralPad, sigma + kSpectralPad));
        rep.method = GapMethod::SpectralExact;
        rep.witness = unitize(amb, Z.basis * RZ.inverse() * v);
        return rep;
    }

    if (!force_net && lp_encodable(amb)) {
        // By positive homogeneity of dist(., Y), the inclination equals
        // 1 / sup { |w|_induced : dist(B_Z w, Y) <= 1 }, and the supremum of
        // the polyhedral norm splits over the facets of the induced ball.
        Space ind = induced_space(Z);
        auto facs = ball_facet_normals(ind, cfg.budget);
        if (facs) {
            double V = 0.0;
            Vec bw;
            bool unbounded = false;
            for (auto& g : *facs) {
                LinearProgram lp;
                std::vector<int> wv(Z.k()), cv(Y.k());
                for (int j = 0; j < Z.k(); ++j) wv[j] = lp.add_var(-g(j), false);
                for (int j = 0; j < Y.k(); ++j) cv[j] = lp.add_var(0.0, false);
                std::vector<LinExpr> coords(amb->dim);
                for (int i = 0; i < amb->dim; ++i) {
                    for (int j = 0; j < Z.k(); ++j)
                        if (Z.basis(i, j) != 0.0) coords[i].add(wv[j], Z.basis(i, j));
                    for (int j = 0; j < Y.k(); ++j)
                        if (Y.basis(i, j) != 0.0) coords[i].add(cv[j], -Y.basis(i, j));
                }
                encode_norm_le(lp, amb, coords, LinExpr(1.0));
                auto r = solve_lp(lp);
                if (r.status == LpResult::Unbounded) {
                    unbounded = true;
                    break;
                }
                if (!r.ok()) continue;
                if (-r.value > V) {
                    V = -r.value;
                    bw = r.x.head(Z.k());
                }
            }
            if (unbounded || V <= 0.0) {
                rep.bound = Bound(0.0, 0.0);
                rep.method = GapMethod::PolyhedralExact;
                return rep;
            }
            double val = 1.0 / V;
            rep.bound = clamp01(Bound(val - kExactPad, val + kExactPad));
            rep.method = GapMethod::PolyhedralExact;
            rep.witness = unitize(amb, Z.basis * bw);
            return rep;
        }
    }

    if (cfg.force == ForceRoute::ForceExact)
        throw std::runtime_error("exact route unavailable for this space/dimension");

    auto eval = [&](const Vec& z) -> Bound { return dist_to_subspace(amb, z, Y, cfg.tol).bound; };
    if (Z.k() <= 4) {
        SweepResult s = inf_net(Z, cfg, eval);
        rep.bound = clamp01(s.bound);
        rep.method = GapMethod::CertifiedNet;
        rep.mesh = s.mesh;
        rep.witness = s.best;
        return rep;
    }
    // Sampled upper bound with local refinement; trivial lower bound.
    Rng rng(cfg.seed);
    double hi = 1.0;
    Vec best = unitize(amb, Z.basis.col(0));
    for (int i = 0; i < 256; ++i) {
        Vec z = unitize(amb, Z.basis * rng.unit_vector(Z.k()));
        Bound b = eval(z);
        if (b.hi <= hi) {
            hi = b.hi;
            best = z;
        }
    }
    rep.bound = Bound(0.0, std::min(1.0, hi));
    rep.method = GapMethod::Multistart;
    rep.witness = best;
    return rep;
}

GapReport dg_metric(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    GapReport t = theta(Y, Z, cfg);
    GapReport rep = t;
    rep.bound = Bound(std::log1p(t.bound.lo), std::log1p(t.bound.hi));
    return rep;
}

double hilbert_theta(const Subspace& Y, const Subspace& Z) {
    require_same_ambient(Y, Z, "hilbert_theta");
    const Space& amb = Y.ambient;
    if (!is_euclidean(amb)) throw std::invalid_argument("hilbert_theta: ambient is not Euclidean");
    const Mat& L = *amb->euclid;
    const int n = amb->dim;
    auto projector = [&](const Subspace& S) -> Mat {
        if (S.k() == 0) return Mat::Zero(n, n);
        Mat Q, R;
        g_orth(L, S.basis, Q, R);
        return Q * Q.transpose();
    };
    Mat D = projector(Y) - projector(Z);
    Eigen::JacobiSVD<Mat> svd(D);
    return svd.singularValues()(0);
}

DualityReport duality_check(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    require_same_ambient(Y, Z, "duality_check");
    DualityReport out;
    out.primal = theta0(Y, Z, cfg);
    out.dual = theta0(annihilator(Z), annihilator(Y), cfg);
    out.overlap = out.primal.bound.lo <= out.dual.bound.hi + 1e-9 &&
                  out.dual.bound.lo <= out.primal.bound.hi + 1e-9;
    return out;
}

BorsukResult borsuk_extremal(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    require_same_ambient(Y, Z, "borsuk_extremal");
    if (Y.k() <= Z.k())
        throw std::invalid_argument("borsuk_extremal: requires dim(Y) > dim(Z), strictly");
    BorsukResult out;
    out.report = theta0(Y, Z, cfg);
    out.witness = out.report.witness;
    out.value = out.report.bound.lo;
    return out;
}

}  // namespace gapkit
