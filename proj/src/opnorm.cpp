#include "opnorm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

#include "net.hpp"
#include "rng.hpp"
#include "simplex.hpp"

namespace gapkit {

namespace {

constexpr double kSpecPad = 1e-11;    // relative pad on singular-value routes
constexpr double kFacetPad = 4.5e-10; // pad on LP facet routes

double eff_mesh(const ComputeCfg& cfg, int k) {
    if (!std::isnan(cfg.mesh)) return cfg.mesh;
    if (k <= 2) return 5e-3;
    if (k == 3) return 2e-2;
    return 0.15;
}

// R factor of the euclid matrix G (thin QR): |G x|_2 = |R x|_2 with R square
// invertible, so the norm-preserving change of variables is x = R^{-1} v.
Mat euclid_r(const Space& s) {
    const Mat& G = *s->euclid;
    Eigen::HouseholderQR<Mat> qr(G);
    Mat R = qr.matrixQR().topRows(G.cols()).triangularView<Eigen::Upper>();
    return R;
}

double sigma_max(const Mat& A) {
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

double sigma_min(const Mat& A) {
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& sv = svd.singularValues();
    return sv(sv.size() - 1);
}

}  // namespace

LinearMap make_linear_map(const Space& domain, const Space& codomain, const Mat& A) {
    if (A.cols() != domain->dim || A.rows() != codomain->dim)
        throw std::invalid_argument("make_linear_map: matrix shape does not match the spaces");
    if (!A.allFinite()) throw std::invalid_argument("make_linear_map: matrix has non-finite entries");
    return LinearMap{domain, codomain, A};
}

Mat kernel_basis(const LinearMap& T) {
    const int n = static_cast<int>(T.A.cols());
    Eigen::JacobiSVD<Mat> svd(T.A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double tol = 1e-10 * smax;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
    return svd.matrixV().rightCols(n - rank);
}

Bound op_norm(const LinearMap& T, const ComputeCfg& cfg) {
    const Space& X = T.domain;
    const Space& Z = T.codomain;
    const int n = X->dim;
    const bool force_net = cfg.force == ForceRoute::ForceNet;

    if (!force_net && is_euclidean(X) && is_euclidean(Z)) {
        Mat R = euclid_r(X);
        double v = sigma_max((*Z->euclid) * T.A * R.inverse());
        double pad = kSpecPad * (1.0 + v);
        return Bound(std::max(0.0, v - pad), v + pad);
    }

    if (!force_net && X->polyhedral) {
        auto verts = ball_vertex_span(X, std::max<long>(cfg.budget, 1200000));
        if (verts) {
            double lo = 0.0, hi = 0.0;
            for (const Vec& v : *verts) {
                Bound nb = norm_enclosure(Z, T.A * v);
                lo = std::max(lo, nb.lo);
                hi = std::max(hi, nb.hi);
            }
            return Bound(lo, hi);
        }
    }
    if (cfg.force == ForceRoute::ForceExact)
        throw std::runtime_error("op_norm: no exact route for these spaces");

    // Certified cap from the Euclidean equivalence constants.
    double cap = Z->c_hi * sigma_max(T.A) / X->c_lo;

    if (n <= 4 || force_net) {
        double mesh = eff_mesh(cfg, n);
        Subspace full = make_subspace(X, Mat::Identity(n, n));
        SphereNet net = sphere_net(full, mesh, cfg.budget);
        double lo = 0.0, hi_net = 0.0;
        for (const Vec& p : net.points) {
            Bound nb = norm_enclosure(Z, T.A * p);
            lo = std::max(lo, nb.lo * (1.0 - 2e-9));
            hi_net = std::max(hi_net, nb.hi);
        }
        double up = cap;
        double slack = net.mesh + 2e-9;
        if (slack < 0.999) up = std::min(up, hi_net / (1.0 - slack));
        return Bound(lo, std::max(lo, up));
    }

    Rng rng(cfg.seed);
    double lo = 0.0;
    for (int i = 0; i < 256; ++i) {
        Vec x = rng.unit_vector(n);
        Bound nx = norm_enclosure(X, x);
        if (nx.hi <= 1e-14) continue;
        x /= nx.hi;  // certainly inside the unit ball
        lo = std::max(lo, norm_enclosure(Z, T.A * x).lo);
    }
    return Bound(lo, std::max(lo, cap));
}

Bound min_modulus(const LinearMap& T, const ComputeCfg& cfg) {
    const int n = T.domain->dim;
    Mat K = kernel_basis(T);
    const int q = n - static_cast<int>(K.cols());
    if (q == 0) return Bound(kInf, kInf);  // zero map: every c works

    // Reduce to the injective map induced on the quotient by the kernel:
    // gamma(T) = inf{ ||That w|| : ||w||_quotient = 1 }.
    Space Qs;
    Mat L;
    if (K.cols() == 0) {
        Qs = T.domain;
        L = Mat::Identity(n, n);
    } else {
        Qs = make_quotient(T.domain, K);
        L = Qs->lift;
    }
    Mat That = T.A * L;  // m x q
    const Space& Z = T.codomain;
    const bool force_net = cfg.force == ForceRoute::ForceNet;

    if (!force_net && is_euclidean(Qs) && is_euclidean(Z)) {
        Mat R = euclid_r(Qs);
        double v = sigma_min((*Z->euclid) * That * R.inverse());
        double pad = kSpecPad * (1.0 + v);
        return Bound(std::max(0.0, v - pad), v + pad);
    }

    if (!force_net && Qs->polyhedral && lp_encodable(Z)) {
        auto facs = ball_facet_normals(Qs, std::max<long>(cfg.budget, 1200000));
        if (facs && !facs->empty()) {
            // V = sup{ ||w||_Q : ||That w|| <= 1 } = max over ball facets g of
            // an LP; the feasible set is symmetric, so half the normals suffice.
            double V = 0.0;
            bool route_ok = true;
            for (const Vec& g : *facs) {
                LinearProgram lp;
                std::vector<int> wv(q);
                for (int j = 0; j < q; ++j) wv[j] = lp.add_var(-g(j), false);
                std::vector<LinExpr> coords(Z->dim);
                for (int i = 0; i < Z->dim; ++i)
                    for (int j = 0; j < q; ++j)
                        if (That(i, j) != 0.0) coords[i].add(wv[j], That(i, j));
                encode_norm_le(lp, Z, coords, LinExpr(1.0));
                auto r = solve_lp(lp);
                if (!r.ok()) {  // induced map is injective, so this is numerical
                    route_ok = false;
                    break;
                }
                V = std::max(V, -r.value);
            }
            if (route_ok && V > 0.0) {
                double gam = 1.0 / V;
                double pad = kFacetPad * (1.0 + gam * gam);
                return Bound(std::max(0.0, gam - pad), gam + pad);
            }
        }
    }
    if (cfg.force == ForceRoute::ForceExact)
        throw std::runtime_error("min_modulus: no exact route for these spaces");

    // Certified floor from equivalence constants.
    double floor_lo = std::max(0.0, Z->c_lo * sigma_min(That) / Qs->c_hi * (1.0 - 1e-9));

    if (q <= 4 || force_net) {
        Bound tn = op_norm(make_linear_map(Qs, Z, That), cfg);
        double mesh = eff_mesh(cfg, q);
        Subspace full = make_subspace(Qs, Mat::Identity(q, q));
        SphereNet net = sphere_net(full, mesh, cfg.budget);
        double lo_min = kInf, hi_min = kInf;
        for (const Vec& p : net.points) {
            Bound nb = norm_enclosure(Z, That * p);
            lo_min = std::min(lo_min, nb.lo);
            hi_min = std::min(hi_min, nb.hi * (1.0 + 2e-9));
        }
        double lower = std::max(0.0, lo_min - tn.hi * (net.mesh + 2e-9));
        lower = std::max(lower, floor_lo);
        return Bound(std::min(lower, hi_min), std::max(lower, hi_min));
    }

    Rng rng(cfg.seed);
    double up = kInf;
    for (int i = 0; i < 256; ++i) {
        Vec w = rng.unit_vector(q);
        Bound nw = norm_enclosure(Qs, w);
        if (nw.lo <= 1e-14) continue;
        w /= nw.lo;  // norm >= 1, so the value still dominates gamma
        up = std::min(up, norm_enclosure(Z, That * w).hi);
    }
    return Bound(std::min(floor_lo, up), std::max(floor_lo, up));
}

}  // namespace gapkit
