#include "constructions.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace gapkit {

namespace {

Vec two(double x0, double x1) {
    Vec v(2);
    v << x0, x1;
    return v;
}

// Coordinatewise |t|^alpha sign t; maps 0 to 0 for every alpha > 0.
Vec power_map(const Vec& x, double alpha) {
    Vec y(x.size());
    for (int i = 0; i < x.size(); ++i) {
        double t = x(i);
        y(i) = t == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(t), alpha), t);
    }
    return y;
}

}  // namespace

LinePairExample example_310(double a, double b) {
    if (!(0 < a && a < b && b <= 1)) throw std::invalid_argument("example_310: need 0 < a < b <= 1");
    LinePairExample ex;
    ex.space = make_lp(2, 1.0);
    ex.y1 = make_subspace(ex.space, two(1, 0));
    ex.y2 = make_subspace(ex.space, two(1, a));
    ex.y3 = make_subspace(ex.space, two(1, b));
    ex.theta_12 = a;
    ex.theta_13 = b;
    ex.theta_23 = (b - a) / (1 + a);
    return ex;
}

SphericalGapExample example_314(double a) {
    if (!(0 < a && a < 1)) throw std::invalid_argument("example_314: need 0 < a < 1");
    SphericalGapExample ex;
    ex.primal = make_lp(2, 1.0);
    ex.y = make_subspace(ex.primal, two(1, a));
    ex.z = make_subspace(ex.primal, two(1, 0));
    ex.dual = dual_of(ex.primal);
    ex.y_perp = annihilator(ex.y);
    ex.z_perp = annihilator(ex.z);
    ex.omega_primal = 2 * a / (1 + a);
    ex.omega_dual = a;
    return ex;
}

NearPairExample douady_pair(const Space& X, const Mat& y_basis, double eps) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("douady_pair: need 0 < eps < 1");
    const int n = X->dim;
    if (y_basis.rows() != n) throw std::invalid_argument("douady_pair: basis row mismatch");
    Space quot = make_quotient(X, y_basis);  // validates 1 <= rank < n
    const int qdim = quot->dim;
    const Mat& proj = quot->proj;  // qdim x n, the coordinate map of the quotient

    NearPairExample ex;
    ex.ambient = make_direct_sum(1.0, {X, quot});

    Mat g0(n + qdim, n);
    g0.setZero();
    g0.topLeftCorner(n, y_basis.cols()) = y_basis;
    g0.bottomRightCorner(qdim, qdim) = Mat::Identity(qdim, qdim);
    ex.g0 = make_subspace(ex.ambient, g0);

    Mat tau(n + qdim, n);
    tau.topRows(n) = eps * Mat::Identity(n, n);
    tau.bottomRows(qdim) = proj;
    ex.tau = tau;
    ex.geps = make_subspace(ex.ambient, tau);
    ex.geps_induced = make_pullback(ex.ambient, tau);
    return ex;
}

MazurPair mazur_maps(double p, int n) {
    if (!(p >= 1 && p < 2)) throw std::invalid_argument("mazur_maps: need 1 <= p < 2");
    if (n < 1) throw std::invalid_argument("mazur_maps: need n >= 1");
    MazurPair mp;
    mp.p = p;
    mp.q = p > 1 ? p / (p - 1) : kInf;
    mp.n = n;
    const double at = 2.0 / p;                      // in (1, 2]
    const double ad = p > 1 ? 2.0 / mp.q : 0.0;     // in [0, 1)
    mp.T = [at](const Vec& x) { return power_map(x, at); };
    mp.D = [ad](const Vec& x) {
        if (ad == 0.0) {  // q = inf: the signum map, S(l2) -> S(linf)
            Vec y(x.size());
            for (int i = 0; i < x.size(); ++i) y(i) = x(i) == 0.0 ? 0.0 : std::copysign(1.0, x(i));
            return y;
        }
        return power_map(x, ad);
    };
    // |s|^a sign s is a-Lipschitz on [-1,1] for a >= 1, so on Euclidean sphere
    // points ||Tx - Ty||_p <= a ||x - y||_p <= a n^{1/p - 1/2} ||x - y||_2.
    mp.lip_t = at * std::pow(double(n), 1.0 / p - 0.5);
    mp.exp_t = 1.0;
    if (p > 1) {
        // For a in (0,1), | |s|^a sign s - |t|^a sign t | <= 2 |s - t|^a, so
        // ||Dx - Dy||_q^q <= 2^q sum |x_i - y_i|^{aq} = 2^q ||x - y||_2^2.
        mp.lip_d = 2.0;
        mp.exp_d = 2.0 / mp.q;
    } else {
        // q = inf: the signum map has no modulus of continuity; report the
        // trivial bound ||Dx - Dy||_inf <= 2.
        mp.lip_d = 2.0;
        mp.exp_d = 0.0;
    }
    return mp;
}

GlueReport kadets_glue(const Space& Y, const Space& Z, const SphereMap& T, const SphereMap& D,
                       const GlueConfig& cfg) {
    if (!(cfg.dual_mesh > 0) || !(cfg.primal_mesh > 0))
        throw std::invalid_argument("kadets_glue: meshes must be positive");
    if (cfg.samples < 1) throw std::invalid_argument("kadets_glue: need samples >= 1");
    const int n = Y->dim, m = Z->dim;

    // Nets on S(Y*) and S(Y), with the achieved meshes in the proper norms.
    Space ydual = dual_of(Y);
    SphereNet dual_net = sphere_net(make_subspace(ydual, Mat::Identity(n, n)), cfg.dual_mesh,
                                    cfg.budget);
    SphereNet primal_net = sphere_net(make_subspace(Y, Mat::Identity(n, n)), cfg.primal_mesh,
                                      cfg.budget);
    const double dmesh = dual_net.mesh;
    const double pmesh = primal_net.mesh;

    // Sampled sphere points of Y and their images.
    Rng rng(cfg.seed ^ 0x71374491ULL);
    std::vector<Vec> ysamp;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e(i) = 1.0;
        ysamp.push_back(e / norm(Y, e));
    }
    for (int i = 0; i < cfg.samples; ++i) {
        Vec v = rng.unit_vector(n);
        ysamp.push_back(v / norm(Y, v));
    }

    // Dual directions: the net, plus a norming functional for each sample (so
    // the Y-image norm is exact there), plus the sample itself scaled to the
    // dual sphere (for power-map pairs D of that point norms the T-image).
    std::vector<Vec> duals = dual_net.points;
    for (const Vec& y : ysamp) {
        duals.push_back(norming_functional(Y, y));
        double dn = dual_norm(Y, y);
        if (dn > 1e-12) duals.push_back(y / dn);
    }

    // Validate the maps on the evaluated points and assemble the rows.
    Mat rows(static_cast<int>(duals.size()), n + m);
    for (std::size_t i = 0; i < duals.size(); ++i) {
        Vec dy = D(duals[i]);
        if (dy.size() != m) throw std::invalid_argument("kadets_glue: D output dimension mismatch");
        double dn = dual_norm(Z, dy);
        if (std::abs(dn - 1.0) > 1e-6)
            throw std::runtime_error("kadets_glue: D does not map the dual sphere to the dual sphere");
        rows.row(static_cast<int>(i)).head(n) = duals[i].transpose();
        rows.row(static_cast<int>(i)).tail(m) = -dy.transpose();
    }

    std::vector<Vec> ypts = primal_net.points;
    ypts.insert(ypts.end(), ysamp.begin(), ysamp.end());
    const int P = static_cast<int>(ypts.size());
    const int R = static_cast<int>(duals.size());
    Mat W(n + m, P);
    for (int j = 0; j < P; ++j) {
        Vec ty = T(ypts[j]);
        if (ty.size() != m) throw std::invalid_argument("kadets_glue: T output dimension mismatch");
        if (std::abs(norm(Z, ty) - 1.0) > 1e-6)
            throw std::runtime_error("kadets_glue: T does not map the unit sphere to the unit sphere");
        W.col(j).head(n) = ypts[j];
        W.col(j).tail(m) = ty;
    }
    // Blocked products keep the evaluation cache-friendly for large nets.
    double kb = 0.0;
    const int cblk = 512, rblk = 8192;
    for (int j0 = 0; j0 < P; j0 += cblk) {
        const int cw = std::min(cblk, P - j0);
        for (int i0 = 0; i0 < R; i0 += rblk) {
            const int rw = std::min(rblk, R - i0);
            kb = std::max(kb,
                          (rows.middleRows(i0, rw) * W.middleCols(j0, cw)).cwiseAbs().maxCoeff());
        }
    }

    // Quotient by the zero-space of the seminorm.
    Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeThinV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * smax) rank = i + 1;
    if (rank < 1) throw std::runtime_error("kadets_glue: seminorm degenerate on all coordinates");
    Mat Cb = svd.matrixV().leftCols(rank);

    GlueReport rep;
    rep.glued = make_max_functionals(Mat(rows * Cb));
    Mat E1 = Mat::Zero(n + m, n), E2 = Mat::Zero(n + m, m);
    E1.topRows(n) = Mat::Identity(n, n);
    E2.bottomRows(m) = Mat::Identity(m, m);
    rep.im_y = make_subspace(rep.glued, Mat(Cb.transpose() * E1));
    rep.im_z = make_subspace(rep.glued, Mat(Cb.transpose() * E2));
    rep.rows = static_cast<int>(duals.size());
    rep.kbound = kb;
    rep.dual_mesh = dmesh;
    rep.primal_mesh = pmesh;

    // Sampled isometry of both images (Z sampled at the T-images). A Z-side
    // failure means the D-images do not norm the sampled sphere points, i.e.
    // the surjectivity premise fails on the evaluated nets.
    double err_y = 0.0, err_z = 0.0;
    for (const Vec& y : ysamp) {
        err_y = std::max(err_y, std::abs(norm(rep.glued, Vec(Cb.transpose() * E1 * y)) - 1.0));
        Vec tz = T(y);
        err_z = std::max(err_z, std::abs(norm(rep.glued, Vec(Cb.transpose() * E2 * tz)) - 1.0));
    }
    rep.isometry_err = std::max(err_y, err_z);
    if (err_z > 1e-6)
        throw std::runtime_error("kadets_glue: net surjectivity check failed (images not normed)");
    if (err_y > 1e-6) throw std::runtime_error("kadets_glue: Y image is not normed at the samples");

    auto mod_t = [&](double d) { return cfg.lip_t * std::pow(d, cfg.exp_t); };
    auto mod_d = [&](double d) { return cfg.lip_d * std::pow(d, cfg.exp_d); };
    // Pad making kbound + pad an upper bound for the full supremum over
    // S(Y) x S(Y*): |y*(y) - (Dy*)(Ty)| moves by at most ||dy|| + mod_t(||dy||)
    // in y and by ||dy*|| + mod_d(||dy*||) in y*.
    rep.kbound_slack = pmesh + mod_t(pmesh) + dmesh + mod_d(dmesh);
    // Unit functionals on unit vectors keep the true supremum at or below 2.
    rep.kbound_upper = std::min(2.0, kb + rep.kbound_slack);

    // Spherical-opening slack. d_z bounds the norming defect of the D-image
    // net on S(Z); the two sides then pay for moving sphere points to net
    // points and for renormalizing near-unit vectors.
    double d_z = std::min(0.99, mod_d(dmesh));
    double side1 = kInf, side2 = kInf;
    if (dmesh < 1) side1 = pmesh + dmesh / (1 - dmesh) + d_z;
    side2 = mod_t(pmesh) + d_z / (1 - d_z) + dmesh;
    rep.slack = std::min(std::max(side1, side2), 2.0);
    rep.omega_upper = std::min(kb + rep.slack, 2.0);
    return rep;
}

std::pair<Vec, Vec> peak_pair(double eps, int grid) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("peak_pair: need 0 < eps < 1");
    if (grid < 8) throw std::invalid_argument("peak_pair: need grid >= 8");
    Vec h0 = Vec::Zero(grid), w = Vec::Zero(grid);
    // Top level set A = {h0 >= eps} is {0, 1}; the remaining values decay
    // below eps, and the last point pairs the trough -eps of h0 with the
    // second maximum 1 of the extension.
    h0(0) = 1.0;
    h0(1) = eps;
    for (int j = 2; j + 1 < grid; ++j) h0(j) = eps * std::pow(0.5, j - 1);
    h0(grid - 1) = -eps;
    w = h0;  // w = h0 on A, |w| <= eps < 1 off A keeps every cross term small
    w(grid - 1) = 1.0;
    return {h0, w};
}

double identity_642(double eps, double b, int grid) {
    if (!(b >= 0 && b <= 1)) throw std::invalid_argument("identity_642: need b in [0,1]");
    auto [h0, w] = peak_pair(eps, grid);
    return (h0 - b * w).cwiseAbs().maxCoeff();
}

CoupledSumTruncation coupled_sum_truncation(int summands, int grid) {
    if (summands < 2) throw std::invalid_argument("coupled_sum_truncation: need summands >= 2");
    if (grid < 8) throw std::invalid_argument("coupled_sum_truncation: need grid >= 8");
    const int N = summands, G = grid;
    const double a = std::sqrt(2.0) - 1.0;

    // Coordinates: h-block h_0..h_{N-1}, then g-block g_1..g_N, each a grid
    // function. The norm is the max of the two coupled 1-sums
    //   sum_i ||h_i - a g_{i+1}||_inf   (i = 0..N-1)
    //   sum_j ||g_j - a h_j||_inf       (j = 1..N, h_N = 0),
    // realized as a pullback of (sum_1 linf) (+)_inf (sum_1 linf) through the
    // coupling matrix, which is injective since a^2 < 1.
    const int dim = 2 * N * G;
    Mat M = Mat::Zero(2 * N * G, dim);
    auto hcol = [&](int i) { return i * G; };            // h_i block start
    auto gcol = [&](int j) { return (N + j - 1) * G; };  // g_j block start
    for (int i = 0; i < N; ++i) {  // rows of the first sum: h_i - a g_{i+1}
        M.block(i * G, hcol(i), G, G) = Mat::Identity(G, G);
        M.block(i * G, gcol(i + 1), G, G) = -a * Mat::Identity(G, G);
    }
    for (int j = 1; j <= N; ++j) {  // rows of the second sum: g_j - a h_j
        int r = (N + j - 1) * G;
        M.block(r, gcol(j), G, G) = Mat::Identity(G, G);
        if (j <= N - 1) M.block(r, hcol(j), G, G) = -a * Mat::Identity(G, G);
    }
    std::vector<Space> blocks;
    for (int i = 0; i < N; ++i) blocks.push_back(make_lp(G, kInf));
    Space one_sum = make_direct_sum(1.0, blocks);
    Space parent = make_direct_sum(kInf, {one_sum, one_sum});

    CoupledSumTruncation tr;
    tr.space = make_pullback(parent, M);
    tr.a = a;
    tr.bound = 2.0 * std::sqrt(2.0) - 2.0;

    Mat hbasis = Mat::Zero(dim, N * G), gbasis = Mat::Zero(dim, N * G);
    hbasis.topRows(N * G) = Mat::Identity(N * G, N * G);
    gbasis.bottomRows(N * G) = Mat::Identity(N * G, N * G);
    tr.y_sub = make_subspace(tr.space, hbasis);
    tr.z_sub = make_subspace(tr.space, gbasis);

    auto [h0, w] = peak_pair(a, G);
    tr.y0 = Vec::Zero(dim);
    tr.y0.segment(hcol(0), G) = h0;
    tr.w0 = Vec::Zero(dim);
    tr.w0.segment(gcol(1), G) = w;

    Vec h1(G);
    h1.setZero();
    h1(0) = 1.0;
    h1(1) = 0.5;
    tr.y1 = Vec::Zero(dim);
    tr.y1.segment(hcol(1), G) = h1;
    return tr;
}

}  // namespace gapkit
