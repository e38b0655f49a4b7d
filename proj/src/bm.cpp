#include "bm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "net.hpp"
#include "rng.hpp"

namespace gapkit {

namespace {

double sigma_min_of(const Mat& A) {
    if (A.rows() == 0 || A.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// Fast (uncertified) sup of ||T v||_cod over the domain ball; winners are
// re-certified through op_norm.
struct DirEval {
    Space dom, cod;
    bool spect = false;
    Mat Gc, Rinv;
    std::vector<Vec> pts;

    double operator()(const Mat& T) const {
        if (spect) {
            Eigen::JacobiSVD<Mat> svd(Gc * (T * Rinv));
            return svd.singularValues()(0);
        }
        double m = 0.0;
        for (const Vec& p : pts) m = std::max(m, norm(cod, T * p));
        return m;
    }
};

DirEval build_dir(const Space& dom, const Space& cod, std::uint64_t seed) {
    DirEval de;
    de.dom = dom;
    de.cod = cod;
    if (is_euclidean(dom) && is_euclidean(cod)) {
        de.spect = true;
        de.Gc = *cod->euclid;
        Eigen::HouseholderQR<Mat> qr(*dom->euclid);
        Mat R = qr.matrixQR().topRows(dom->dim).triangularView<Eigen::Upper>();
        de.Rinv = R.inverse();
        return de;
    }
    if (dom->polyhedral) {
        if (auto verts = ball_vertex_span(dom, 1200000)) {
            de.pts = *verts;
            return de;
        }
    }
    Rng rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
    for (int i = 0; i < 220; ++i) {
        Vec x = rng.unit_vector(dom->dim);
        double nx = norm(dom, x);
        if (nx > 1e-14) de.pts.push_back(x / nx);
    }
    return de;
}

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

double certify_mesh(const ComputeCfg& cfg, int k) {
    if (!std::isnan(cfg.mesh)) return cfg.mesh;
    if (k <= 2) return 1e-4;
    if (k == 3) return 5e-3;
    return 2e-2;
}

// One direction of the distance search; returns the best map found.
Mat search_direction(const Space& A, const Space& B, const ComputeCfg& cfg) {
    const int k = A->dim;
    DirEval fwd = build_dir(A, B, cfg.seed);
    DirEval bwd = build_dir(B, A, cfg.seed + 1);
    auto f = [&](const Vec& th) {
        Mat T(k, k);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i) T(i, j) = th(j * k + i);
        if (std::abs(T.determinant()) < 1e-8) return 1e6;
        return fwd(T) * bwd(T.inverse());
    };
    const int starts = static_cast<int>(std::clamp<long>(cfg.budget / 1500, 16, 128));
    Rng rng(cfg.seed);
    Vec best_th = Vec::Zero(k * k);
    double best = kInf;
    for (int s = 0; s < starts; ++s) {
        Mat T0 = Mat::Identity(k, k);
        if (s > 0) {
            Mat G = rng.gaussian_matrix(k, k);
            T0 = (s % 2 == 1) ? Mat(T0 + 0.5 * G) : G;
            if (std::abs(T0.determinant()) < 1e-6) T0 += Mat::Identity(k, k);
        }
        Vec th(k * k);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i) th(j * k + i) = T0(i, j);
        double v = pattern_min(f, th, 0.4, 1e-5, 1600);
        if (v < best) {
            best = v;
            best_th = th;
        }
    }
    pattern_min(f, best_th, 3e-5, 1e-9, 4000);
    Mat T(k, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) T(i, j) = best_th(j * k + i);
    return T;
}

}  // namespace

BmResult bm_upper(const Space& Y, const Space& Z, const ComputeCfg& cfg) {
    if (Y->dim != Z->dim) return {kInf, Mat()};
    if (Y->dim > 4) throw std::invalid_argument("bm_upper: dimensions above 4 not supported");
    const int k = Y->dim;
    ComputeCfg cert = cfg;
    cert.mesh = certify_mesh(cfg, k);

    BmResult best;
    for (int dir = 0; dir < 2; ++dir) {
        const Space& A = dir == 0 ? Y : Z;
        const Space& B = dir == 0 ? Z : Y;
        Mat T = search_direction(A, B, cfg);
        if (std::abs(T.determinant()) < 1e-8) continue;
        Mat Tyz = dir == 0 ? T : Mat(T.inverse());  // orient Y -> Z
        double n1 = op_norm(make_linear_map(Y, Z, Tyz), cert).hi;
        double n2 = op_norm(make_linear_map(Z, Y, Mat(Tyz.inverse())), cert).hi;
        double up = std::max(1.0, n1 * n2);
        if (up < best.upper) {
            best.upper = up;
            best.T = Tyz;
        }
    }
    return best;
}

Prop61Report prop61_check(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg) {
    Prop61Report rep;
    OperatorGapReport r0 = r0_bounds(Y, Z, cfg);
    rep.u = r0.bound.hi;
    if (!r0.witness || rep.u >= 1.0 || Y.k() < 1 || Y.k() != Z.k()) return rep;
    rep.applicable = true;
    rep.rhs = (1.0 + rep.u) / (1.0 - rep.u) + cfg.tol;

    Space indY = induced_space(Y);
    Space indZ = induced_space(Z);
    rep.d_upper = bm_upper(indY, indZ, cfg).upper;

    // The witness restricted to Y, in the coordinate systems of the two lines.
    Mat Mc = Z.basis.transpose() * (*r0.witness) * Y.basis;
    ComputeCfg cert = cfg;
    cert.mesh = certify_mesh(cfg, Y.k());
    double n1 = op_norm(make_linear_map(indY, indZ, Mc), cert).hi;
    double n2 = op_norm(make_linear_map(indZ, indY, Mat(Mc.inverse())), cert).hi;
    rep.direct = n1 * n2;
    rep.ok = rep.d_upper <= rep.rhs && rep.direct <= rep.rhs;
    return rep;
}

Prop62Report prop62_embed(const Space& Y, const Space& Z, const Mat& U0, double eps,
                          const ComputeCfg& cfg) {
    if (!(eps > 0.0)) throw std::invalid_argument("prop62_embed: eps must be positive");
    const int k = Y->dim;
    if (Z->dim != k || U0.rows() != k || U0.cols() != k)
        throw std::invalid_argument("prop62_embed: U must map Y onto Z with equal dims");
    if (sigma_min_of(U0) <= 1e-10)
        throw std::invalid_argument("prop62_embed: U is not invertible");

    Prop62Report rep;
    double nU = op_norm(make_linear_map(Y, Z, U0), cfg).hi;
    if (nU <= 1e-12) throw std::invalid_argument("prop62_embed: U vanishes");
    Mat U = U0 / nU;
    Mat Uinv = U.inverse();
    rep.u_inv = op_norm(make_linear_map(Z, Y, Uinv), cfg).hi;
    rep.bound_val = std::max(0.0, rep.u_inv - 1.0);

    // Dual directions z* on S(Z*): vertices of the dual ball when polyhedral
    // (= facet normals of the primal ball), otherwise a dual-sphere net.
    std::vector<Vec> zfacets;
    if (Z->polyhedral) {
        if (auto facs = ball_facet_normals(Z, 1200000)) zfacets = *facs;
    }
    std::vector<Vec> duals = zfacets;
    if (duals.empty()) {
        Space dz = dual_of(Z);
        double mesh = std::isnan(cfg.mesh) ? (k <= 2 ? 5e-3 : 2e-2) : cfg.mesh;
        SphereNet net = sphere_net(make_subspace(dz, Mat::Identity(k, k)), mesh, cfg.budget);
        duals = net.points;
    }

    // Isometry check samples (norming rows for them are gluing inputs, which
    // is what makes the embedded copies exactly isometric at the checked set).
    const int nsamp = 1000;
    Rng rng(cfg.seed ^ 0x428a2f98ULL);
    std::vector<Vec> ysamp, zsamp;
    for (int i = 0; i < k; ++i) {
        Vec e = Vec::Zero(k);
        e(i) = 1.0;
        ysamp.push_back(e / norm(Y, e));
    }
    for (int i = 0; i < nsamp; ++i) {
        Vec y = rng.unit_vector(k);
        double ny = norm(Y, y);
        if (ny > 1e-14) ysamp.push_back(y / ny);
        Vec z = rng.unit_vector(k);
        double nz = norm(Z, z);
        if (nz > 1e-14) zsamp.push_back(z / nz);
    }
    for (const Vec& y : ysamp) {
        Vec ystar = norming_functional(Y, y);
        Vec z0 = Uinv.transpose() * ystar;
        double dn = dual_norm(Z, z0);
        if (dn > 1e-12) duals.push_back(z0 / dn);
    }

    // Rows [ (U^T z*)^T / s | z*^T ] with s = ||U^T z*||_{Y*}.
    std::vector<Vec> rows_v;
    std::vector<double> svals;
    for (const Vec& zs : duals) {
        Vec uz = U.transpose() * zs;
        double s = dual_norm(Y, uz);
        if (s <= 1e-12) continue;
        Vec row(2 * k);
        row.head(k) = uz / s;
        row.tail(k) = zs;
        rows_v.push_back(row);
        svals.push_back(s);
    }
    const int R = static_cast<int>(rows_v.size());
    Mat rows(R, 2 * k);
    for (int i = 0; i < R; ++i) rows.row(i) = rows_v[i].transpose();
    Mat UI(k, 2 * k);
    UI.leftCols(k) = U;
    UI.rightCols(k) = Mat::Identity(k, k);

    // Zero-space of the seminorm = kernel of the stacked coefficient matrix;
    // the glued space lives on its orthogonal complement.
    Mat stack(k + R, 2 * k);
    stack.topRows(k) = UI;
    stack.bottomRows(R) = rows;
    Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-10 * smax) ++rank;
    Mat Cb = svd.matrixV().leftCols(rank);           // complement of the zero-space
    Mat K = svd.matrixV().rightCols(2 * k - rank);   // zero-space
    const int d = rank;

    // Glued norm p(w) = max( ||UI w||_Z , max_i |r_i . w| ).  Pick the
    // representation with the tightest equivalence constants, since net-based
    // bounds downstream scale with them.
    Space glued;
    Mat ZM = UI * Cb;
    if (d == k) {
        // The functional rows vanish on ker(UI), so UI restricted to the
        // complement coordinates is square and invertible: express the first
        // term as a genuine pullback of Z and the rest as functionals.
        Eigen::JacobiSVD<Mat> zsvd(ZM);
        if (zsvd.singularValues()(k - 1) > 1e-10) {
            glued = make_max_of({make_pullback(Z, ZM),
                                 make_max_functionals(Mat(rows * Cb))});
        }
    }
    if (!glued && !zfacets.empty()) {
        // ||v||_Z = max_f <f, v> over the facet normals, so the whole glued
        // norm is a single stack of functionals.
        const int nf = static_cast<int>(zfacets.size());
        Mat all(nf + R, d);
        for (int i = 0; i < nf; ++i) all.row(i) = zfacets[i].transpose() * ZM;
        all.bottomRows(R) = rows * Cb;
        glued = make_max_functionals(all);
    }
    if (!glued) {
        Space sum_space = make_direct_sum(kInf, {Z, make_lp(R, kInf)});
        glued = make_pullback(sum_space, Mat(stack * Cb));
    }
    rep.glued = glued;

    Mat E1 = Mat::Zero(2 * k, k), E2 = Mat::Zero(2 * k, k);
    E1.topRows(k) = Mat::Identity(k, k);
    E2.bottomRows(k) = Mat::Identity(k, k);
    Mat BY = Cb.transpose() * E1;  // i_Y(y) = coordinates of (y, 0)
    Mat BZ = Cb.transpose() * E2;
    rep.imY = make_subspace(glued, BY);
    rep.imZ = make_subspace(glued, BZ);

    // Embedding errors at the check samples (both sides are unit vectors).
    double err = 0.0;
    for (const Vec& y : ysamp) err = std::max(err, std::abs(norm(glued, BY * y) - 1.0));
    for (const Vec& z : zsamp) err = std::max(err, std::abs(norm(glued, BZ * z) - 1.0));
    rep.isometry_err = err;
    rep.isometry_ok = err <= 1e-6;

    // Openings between the images.
    ComputeCfg om_cfg = cfg;
    if (std::isnan(om_cfg.mesh)) om_cfg.mesh = 2e-2;
    GapReport om = omega(rep.imY, rep.imZ, om_cfg);
    rep.omega_lo = om.bound.lo;
    rep.omega_hi = om.bound.hi;
    rep.omega_ok = rep.omega_lo <= rep.bound_val + cfg.tol + 1e-9;

    // The proof's operator T(y,z) = (-U^{-1} z, 2z + Uy): row-wise certificate
    // for ||T - I|| on the glued space. Each row of rows*(Ttil - I) equals
    // (1 - 1/s_i) [z*^T U | z*^T], whose value on the unit ball is at most
    // |1 - 1/s_i| ||z + Uy||_Z <= |1 - 1/s_i|; the Z-part of T - I vanishes.
    Mat Ttil = Mat::Zero(2 * k, 2 * k);
    Ttil.topRightCorner(k, k) = -Uinv;
    Ttil.bottomLeftCorner(k, k) = U;
    Ttil.bottomRightCorner(k, k) = 2.0 * Mat::Identity(k, k);
    double formula_resid = (UI * Ttil - UI).cwiseAbs().maxCoeff();
    Mat lhs = rows * (Ttil - Mat::Identity(2 * k, 2 * k));
    double worst = 0.0;
    for (int i = 0; i < R; ++i) {
        double c = 1.0 - 1.0 / svals[i];
        Vec expect(2 * k);
        expect.head(k) = U.transpose() * rows_v[i].tail(k);
        expect.tail(k) = rows_v[i].tail(k);
        formula_resid = std::max(formula_resid,
                                 (lhs.row(i).transpose() - c * expect).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(c));
    }
    rep.r0_via_T = worst * (1.0 + 1e-7) + 1e-12;
    Mat That = Cb.transpose() * Ttil * Cb;
    bool invertible = sigma_min_of(That) > 1e-8;
    Mat img = That * rep.imY.basis;
    double img_resid = (img - rep.imZ.basis * (rep.imZ.basis.transpose() * img)).norm();
    bool maps_into = img_resid <= 1e-8;
    double kernel_resid = K.cols() ? (stack * (Ttil * K)).cwiseAbs().maxCoeff() : 0.0;
    rep.r0_ok = invertible && maps_into && formula_resid <= 1e-8 && kernel_resid <= 1e-8 &&
                rep.r0_via_T <= rep.bound_val + cfg.tol + 1e-9;
    rep.note = "rows: " + std::to_string(R) + ", glued dim: " + std::to_string(d);
    return rep;
}

}  // namespace gapkit
