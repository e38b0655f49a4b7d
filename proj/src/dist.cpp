#include "dist.hpp"

#include <cmath>
#include <stdexcept>

namespace gapkit {

namespace {

// Thin QR with invertible R for a full-column-rank matrix.
void thin_qr(const Mat& A, Mat& Q, Mat& R) {
    Eigen::HouseholderQR<Mat> qr(A);
    Q = qr.householderQ() * Mat::Identity(A.rows(), A.cols());
    R = Q.transpose() * A;
}

// Pattern-search minimizer over R^k (derivative-free, deterministic).
template <typename F>
Vec pattern_search(const F& f, Vec w, double scale, double final_radius) {
    const int k = static_cast<int>(w.size());
    std::vector<Vec> dirs;
    for (int i = 0; i < k; ++i) {
        Vec d = Vec::Zero(k);
        d(i) = 1.0;
        dirs.push_back(d);
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const double h = std::sqrt(0.5);
            Vec d = Vec::Zero(k);
            d(i) = d(j) = h;
            dirs.push_back(d);
            d(j) = -h;
            dirs.push_back(d);
        }
    double fv = f(w);
    double radius = 0.25 * scale;
    while (radius > final_radius) {
        bool improved = false;
        for (auto& d : dirs) {
            for (double sgn : {1.0, -1.0}) {
                Vec cand = w + sgn * radius * d;
                double fc = f(cand);
                if (fc < fv - 1e-15 * (1 + fv)) {
                    w = cand;
                    fv = fc;
                    improved = true;
                }
            }
        }
        if (!improved) radius *= 0.5;
    }
    return w;
}

}  // namespace

DistResult dist_to_subspace(const Space& amb, const Vec& x, const Subspace& Z, double tol) {
    if (tol <= 0) throw std::invalid_argument("dist_to_subspace: tol must be positive");
    if (x.size() != amb->dim) throw std::invalid_argument("dist_to_subspace: dim mismatch");
    AffineMinResult r = min_norm_over_affine(amb, x, Z.basis, tol);
    DistResult out;
    out.bound = r.bound;
    out.witness = Z.k() ? Vec(Z.basis * r.w) : Vec(Vec::Zero(amb->dim));
    return out;
}

DistResult dist_to_ball(const Space& amb, const Vec& x, const Subspace& Z, double tol) {
    if (tol <= 0) throw std::invalid_argument("dist_to_ball: tol must be positive");
    if (x.size() != amb->dim) throw std::invalid_argument("dist_to_ball: dim mismatch");
    DistResult out;
    if (Z.k() == 0) {
        out.bound = norm_enclosure(amb, x);
        out.witness = Vec::Zero(amb->dim);
        return out;
    }
    const Mat& B = Z.basis;
    Space ind = induced_space(Z);

    // If the unconstrained minimizer already lies in the ball, it is optimal.
    AffineMinResult un = min_norm_over_affine(amb, x, B, tol);
    if (norm(ind, un.w) <= 1.0 + 1e-12) {
        out.bound = un.bound;
        out.witness = B * un.w;
        return out;
    }

    if (lp_encodable(amb)) {
        LinearProgram lp;
        std::vector<int> wv(Z.k());
        for (int j = 0; j < Z.k(); ++j) wv[j] = lp.add_var(0.0, false);
        int t = lp.add_var(1.0, true);
        std::vector<LinExpr> coords = vec_to_exprs(x);
        std::vector<LinExpr> wexprs(Z.k());
        for (int j = 0; j < Z.k(); ++j) wexprs[j] = LinExpr::var(wv[j]);
        for (int i = 0; i < amb->dim; ++i)
            for (int j = 0; j < Z.k(); ++j)
                if (B(i, j) != 0.0) coords[i].add(wv[j], -B(i, j));
        encode_norm_le(lp, amb, coords, LinExpr::var(t));
        encode_norm_le(lp, ind, wexprs, LinExpr(1.0));
        auto r = solve_lp(lp);
        if (!r.ok()) throw std::runtime_error("dist_to_ball: LP failed");
        out.bound = Bound(std::max(0.0, r.value - kLpTol), r.value + kLpTol);
        out.witness = B * r.x.head(Z.k());
        return out;
    }

    if (amb->euclid) {
        // min |b - Av| over |v| <= 1 in QR coordinates; boundary case solved
        // by Lagrange bisection on (A^T A + lam I) v = A^T b.
        Mat A = (*amb->euclid) * B, Q, R;
        thin_qr(A, Q, R);
        Vec b = (*amb->euclid) * x;
        Vec a = Q.transpose() * b;
        double rn = (b - Q * a).norm();
        // Here |a| > 1 (unconstrained minimizer outside ball): v* = a/|a|.
        Vec v = a / a.norm();
        double d = std::sqrt((a.norm() - 1.0) * (a.norm() - 1.0) + rn * rn);
        out.bound = Bound(std::max(0.0, d - 1e-12 * (1 + d)), d + 1e-12 * (1 + d));
        out.witness = B * R.inverse() * v;
        return out;
    }

    // General route: clamped pattern search for the upper bound, dual
    // certificate + reverse triangle for the lower bound.
    auto clamp = [&](const Vec& v) -> Vec {
        double nv = norm(ind, v);
        return nv > 1.0 ? Vec(v / nv) : v;
    };
    auto f = [&](const Vec& v) { return norm(amb, x - B * clamp(v)); };
    Vec w0 = clamp(un.w);
    Vec w = pattern_search(f, w0, std::max(1.0, w0.norm()), 1e-9);
    Vec z = B * clamp(w);
    Bound up = norm_enclosure(amb, x - z);

    double lower = std::max(0.0, un.bound.lo);
    lower = std::max(lower, norm_enclosure(amb, x).lo - 1.0);
    if (cheap_dual(amb) && cheap_dual(ind)) {
        Vec g = norming_functional(amb, x - z);
        if (g.norm() > 0) {
            double gd = std::max(1.0, norm_enclosure(dual_of(amb), g).hi);
            double sup_ball = norm_enclosure(dual_of(ind), B.transpose() * g).hi;
            lower = std::max(lower, (g.dot(x) - sup_ball) / gd);
        }
    }
    lower = std::max(0.0, std::min(lower, up.hi));
    out.bound = Bound(lower, up.hi);
    out.witness = z;
    (void)tol;
    return out;
}

DistResult dist_to_sphere(const Space& amb, const Vec& x, const Subspace& Z, double tol,
                          long facet_budget) {
    if (tol <= 0) throw std::invalid_argument("dist_to_sphere: tol must be positive");
    if (x.size() != amb->dim) throw std::invalid_argument("dist_to_sphere: dim mismatch");
    if (Z.k() < 1) throw std::invalid_argument("dist_to_sphere: zero subspace has empty sphere");
    const Mat& B = Z.basis;
    DistResult out;

    if (Z.k() == 1) {
        Vec b = B.col(0);
        Vec bh = b / norm(amb, b);
        Bound plus = norm_enclosure(amb, x - bh);
        Bound minus = norm_enclosure(amb, x + bh);
        if (plus.hi <= minus.hi) {
            out.bound = plus;
            out.witness = bh;
        } else {
            out.bound = minus;
            out.witness = -bh;
        }
        return out;
    }

    if (amb->euclid) {
        Mat A = (*amb->euclid) * B, Q, R;
        thin_qr(A, Q, R);
        Vec b = (*amb->euclid) * x;
        Vec a = Q.transpose() * b;
        double rn = (b - Q * a).norm();
        Vec v;
        double d;
        if (a.norm() > 1e-14) {
            v = a / a.norm();
            d = std::sqrt((a.norm() - 1.0) * (a.norm() - 1.0) + rn * rn);
        } else {
            v = Vec::Zero(Z.k());
            v(0) = 1.0;
            d = std::sqrt(1.0 + rn * rn);
        }
        out.bound = Bound(std::max(0.0, d - 1e-12 * (1 + d)), d + 1e-12 * (1 + d));
        out.witness = B * R.inverse() * v;
        return out;
    }

    Space ind = induced_space(Z);
    if (lp_encodable(amb)) {
        auto facs = ball_facet_normals(ind, facet_budget);
        if (facs && 2 * static_cast<long>(facs->size()) <= facet_budget) {
            // The sphere is the union of the ball's facets; minimize over each.
            double best = kInf;
            Vec bw;
            for (auto& g : *facs) {
                LinearProgram lp;
                std::vector<int> wv(Z.k());
                for (int j = 0; j < Z.k(); ++j) wv[j] = lp.add_var(0.0, false);
                int t = lp.add_var(1.0, true);
                std::vector<LinExpr> coords = vec_to_exprs(x);
                std::vector<LinExpr> wexprs(Z.k());
                LinExpr gdot;
                for (int j = 0; j < Z.k(); ++j) {
                    wexprs[j] = LinExpr::var(wv[j]);
                    gdot.add(wv[j], g(j));
                    for (int i = 0; i < amb->dim; ++i)
                        if (B(i, j) != 0.0) coords[i].add(wv[j], -B(i, j));
                }
                encode_norm_le(lp, amb, coords, LinExpr::var(t));
                encode_norm_le(lp, ind, wexprs, LinExpr(1.0));
                lp.add_row(gdot, LinearProgram::EQ, 1.0);
                auto r = solve_lp(lp);
                if (!r.ok()) continue;
                if (r.value < best) {
                    best = r.value;
                    bw = B * r.x.head(Z.k());
                }
            }
            if (best < kInf) {
                out.bound = Bound(std::max(0.0, best - kLpTol), best + kLpTol);
                out.witness = bw;
                return out;
            }
        }
    }

    // Generic route: normalized pattern search upper bound; lower bound from
    // containment (sphere inside ball inside subspace) and reverse triangle.
    AffineMinResult un = min_norm_over_affine(amb, x, B, tol);
    Vec v0 = un.w;
    if (norm(ind, v0) < 1e-9) {
        v0 = Vec::Zero(Z.k());
        v0(0) = 1.0;
    }
    auto f = [&](const Vec& v) {
        double nv = norm(ind, v);
        if (nv < 1e-12) return kInf;
        return norm(amb, x - B * (v / nv));
    };
    Vec w = pattern_search(f, v0 / norm(ind, v0), 1.0, 1e-9);
    Vec z = B * (w / norm(ind, w));
    Bound up = norm_enclosure(amb, x - z);

    DistResult ball = dist_to_ball(amb, x, Z, tol);
    Bound nx = norm_enclosure(amb, x);
    double lower = std::max({0.0, un.bound.lo, ball.bound.lo, nx.lo - 1.0, 1.0 - nx.hi});
    lower = std::min(lower, up.hi);
    out.bound = Bound(lower, up.hi);
    out.witness = z;
    return out;
}

}  // namespace gapkit
