#include "space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rng.hpp"

namespace gapkit {

namespace {

double lp_equiv_lo(int n, double p) {
    // c with ||x||_p >= c |x|_2
    if (p <= 2.0) return 1.0;
    if (p == kInf) return std::pow(double(n), -0.5);
    return std::pow(double(n), 1.0 / p - 0.5);
}
double lp_equiv_hi(int n, double p) {
    // c with ||x||_p <= c |x|_2
    if (p >= 2.0) return 1.0;
    return std::pow(double(n), 1.0 / p - 0.5);
}

Mat orthonormal_range(const Mat& A) {
    if (A.cols() == 0) return Mat(A.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > kRankTolFactor * std::max(smax, 1.0)) ++r;
    return svd.matrixU().leftCols(r);
}

Mat orthonormal_nullspace(const Mat& A) {
    // Basis of ker(A) (columns), A is m x n.
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > kRankTolFactor * std::max(smax, 1.0)) ++r;
    return svd.matrixV().rightCols(A.cols() - r);
}

double sigma_min(const Mat& A) {
    if (A.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(svd.singularValues().size() - 1);
}
double sigma_max(const Mat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

std::shared_ptr<SpaceImpl> node(NormKind k, int dim) {
    auto s = std::make_shared<SpaceImpl>();
    s->kind = k;
    s->dim = dim;
    return s;
}

void analyze(const std::shared_ptr<SpaceImpl>& s);

}  // namespace

Space make_lp(int dim, double p) {
    if (dim < 1) throw std::invalid_argument("lp: dim must be >= 1");
    if (!(p >= 1.0)) throw std::invalid_argument("lp: p must be >= 1");
    auto s = node(NormKind::Lp, dim);
    s->p = p;
    analyze(s);
    return s;
}

Space make_weighted_lp(double p, const Vec& weights) {
    if (weights.size() < 1) throw std::invalid_argument("weighted_lp: empty weights");
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_lp: p must be >= 1");
    for (int i = 0; i < weights.size(); ++i)
        if (!(weights(i) > 0)) throw std::invalid_argument("weighted_lp: weights must be positive");
    auto s = node(NormKind::WeightedLp, static_cast<int>(weights.size()));
    s->p = p;
    s->weights = weights;
    analyze(s);
    return s;
}

Space make_direct_sum(double p, std::vector<Space> parts) {
    if (parts.empty()) throw std::invalid_argument("direct_sum: no parts");
    if (!(p >= 1.0)) throw std::invalid_argument("direct_sum: p must be >= 1");
    int dim = 0;
    for (auto& c : parts) dim += c->dim;
    auto s = node(NormKind::DirectSum, dim);
    s->p = p;
    s->children = std::move(parts);
    analyze(s);
    return s;
}

Space make_quotient(const Space& parent, const Mat& kernel) {
    if (kernel.rows() != parent->dim) throw std::invalid_argument("quotient: kernel row mismatch");
    if (kernel.cols() < 1 || kernel.cols() >= parent->dim)
        throw std::invalid_argument("quotient: kernel must be a proper nonzero subspace");
    Mat K = orthonormal_range(kernel);
    if (K.cols() != kernel.cols()) throw std::invalid_argument("quotient: kernel basis is rank deficient");
    Mat lift = orthonormal_nullspace(K.transpose());
    return make_quotient_lift(parent, K, lift, lift.transpose());
}

Space make_quotient_lift(const Space& parent, const Mat& kernel, const Mat& lift, const Mat& proj) {
    int n = parent->dim;
    int q = static_cast<int>(lift.cols());
    if (kernel.rows() != n || lift.rows() != n || proj.cols() != n || proj.rows() != q)
        throw std::invalid_argument("quotient: shape mismatch");
    if ((proj * lift - Mat::Identity(q, q)).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("quotient: proj*lift != I");
    if (kernel.cols() > 0 && (proj * kernel).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("quotient: proj does not annihilate kernel");
    auto s = node(NormKind::Quotient, q);
    s->children = {parent};
    s->kernel = kernel;
    s->lift = lift;
    s->proj = proj;
    analyze(s);
    return s;
}

Space make_pullback(const Space& parent, const Mat& map) {
    if (map.rows() != parent->dim) throw std::invalid_argument("pullback: map row mismatch");
    if (map.cols() < 1 || map.cols() > map.rows())
        throw std::invalid_argument("pullback: map must be injective (cols <= rows)");
    auto s = node(NormKind::Pullback, static_cast<int>(map.cols()));
    s->children = {parent};
    s->map = map;
    analyze(s);
    return s;
}

Space make_max_functionals(const Mat& rows) {
    if (rows.rows() < 1) throw std::invalid_argument("max_functionals: no rows");
    auto s = node(NormKind::MaxFunctionals, static_cast<int>(rows.cols()));
    s->map = rows;
    analyze(s);
    return s;
}

Space make_max_of(std::vector<Space> parts) {
    if (parts.empty()) throw std::invalid_argument("max_of: no parts");
    for (auto& c : parts)
        if (c->dim != parts[0]->dim) throw std::invalid_argument("max_of: dim mismatch");
    if (parts.size() == 1) return parts[0];
    auto s = node(NormKind::MaxOf, parts[0]->dim);
    s->children = std::move(parts);
    analyze(s);
    return s;
}

namespace {

void analyze(const std::shared_ptr<SpaceImpl>& s) {
    switch (s->kind) {
        case NormKind::Lp: {
            s->polyhedral = (s->p == 1.0 || s->p == kInf);
            s->c_lo = lp_equiv_lo(s->dim, s->p);
            s->c_hi = lp_equiv_hi(s->dim, s->p);
            if (s->p == 2.0) s->euclid = Mat::Identity(s->dim, s->dim);
            break;
        }
        case NormKind::WeightedLp: {
            s->polyhedral = (s->p == 1.0 || s->p == kInf);
            double wmin = s->weights.minCoeff(), wmax = s->weights.maxCoeff();
            if (s->p == kInf) {
                s->c_lo = wmin * std::pow(double(s->dim), -0.5);
                s->c_hi = wmax;
            } else {
                double a = std::pow(wmin, 1.0 / s->p), b = std::pow(wmax, 1.0 / s->p);
                s->c_lo = lp_equiv_lo(s->dim, s->p) * a;
                s->c_hi = lp_equiv_hi(s->dim, s->p) * b;
            }
            if (s->p == 2.0) s->euclid = Vec(s->weights.array().sqrt()).asDiagonal().toDenseMatrix();
            break;
        }
        case NormKind::DirectSum: {
            int J = static_cast<int>(s->children.size());
            bool poly = (s->p == 1.0 || s->p == kInf);
            double lo = kInf, hi = 0.0;
            bool euclid_ok = (s->p == 2.0);
            long erows = 0;
            for (auto& c : s->children) {
                poly = poly && c->polyhedral;
                lo = std::min(lo, c->c_lo);
                hi = std::max(hi, c->c_hi);
                if (!c->euclid) euclid_ok = false;
                else erows += c->euclid->rows();
            }
            s->polyhedral = poly;
            s->c_lo = lp_equiv_lo(J, s->p) * lo;
            s->c_hi = lp_equiv_hi(J, s->p) * hi;
            if (euclid_ok) {
                Mat G = Mat::Zero(erows, s->dim);
                long r0 = 0, c0 = 0;
                for (auto& c : s->children) {
                    G.block(r0, c0, c->euclid->rows(), c->dim) = *c->euclid;
                    r0 += c->euclid->rows();
                    c0 += c->dim;
                }
                s->euclid = G;
            }
            break;
        }
        case NormKind::Quotient: {
            const Space& par = s->children[0];
            Mat Khat = orthonormal_range(s->kernel);
            Mat P = Mat::Identity(par->dim, par->dim) - Khat * Khat.transpose();
            Mat M = P * s->lift;
            double smin = sigma_min(M), smax = sigma_max(M);
            if (smin < 1e-12) throw std::invalid_argument("quotient: lift not transversal to kernel");
            s->polyhedral = par->polyhedral;
            s->c_lo = par->c_lo * smin;
            s->c_hi = par->c_hi * smax;
            if (par->euclid) {
                const Mat& G = *par->euclid;
                Mat U = orthonormal_range(G * s->kernel);
                Mat GL = G * s->lift;
                s->euclid = GL - U * (U.transpose() * GL);
            }
            break;
        }
        case NormKind::Pullback: {
            const Space& par = s->children[0];
            double smin = sigma_min(s->map);
            if (smin < 1e-12) throw std::invalid_argument("pullback: map not injective");
            s->polyhedral = par->polyhedral;
            s->c_lo = par->c_lo * smin;
            s->c_hi = par->c_hi * sigma_max(s->map);
            if (par->euclid) s->euclid = (*par->euclid) * s->map;
            break;
        }
        case NormKind::MaxFunctionals: {
            const Mat& F = s->map;
            double smin = sigma_min(F);
            if (smin < 1e-12) throw std::invalid_argument("max_functionals: rows rank deficient");
            s->polyhedral = true;
            s->c_lo = smin / std::sqrt(double(F.rows()));
            double mx = 0;
            for (int i = 0; i < F.rows(); ++i) mx = std::max(mx, F.row(i).norm());
            s->c_hi = mx;
            break;
        }
        case NormKind::MaxOf: {
            bool poly = true;
            double lo = 0.0, hi = 0.0;
            for (auto& c : s->children) {
                poly = poly && c->polyhedral;
                lo = std::max(lo, c->c_lo);
                hi = std::max(hi, c->c_hi);
            }
            s->polyhedral = poly;
            s->c_lo = lo;
            s->c_hi = hi;
            break;
        }
    }
    if (!(s->c_lo > 0) || !(s->c_hi >= s->c_lo))
        throw std::invalid_argument("space: degenerate equivalence constants");
}

double lp_combine(double p, const Vec& v) {
    if (p == kInf) return v.cwiseAbs().maxCoeff();
    if (p == 1.0) return v.cwiseAbs().sum();
    if (p == 2.0) return v.norm();
    double acc = 0;
    for (int i = 0; i < v.size(); ++i) acc += std::pow(std::fabs(v(i)), p);
    return std::pow(acc, 1.0 / p);
}

}  // namespace

bool is_euclidean(const Space& s) { return s->euclid.has_value(); }

Bound norm_enclosure(const Space& s, const Vec& x) {
    if (x.size() != s->dim) throw std::invalid_argument("norm: dim mismatch");
    if (s->euclid) return Bound::point(((*s->euclid) * x).norm());
    switch (s->kind) {
        case NormKind::Lp:
            return Bound::point(lp_combine(s->p, x));
        case NormKind::WeightedLp: {
            if (s->p == kInf) return Bound::point((s->weights.array() * x.array().abs()).maxCoeff());
            Vec scaled(x.size());
            for (int i = 0; i < x.size(); ++i)
                scaled(i) = std::pow(s->weights(i), 1.0 / s->p) * x(i);
            return Bound::point(lp_combine(s->p, scaled));
        }
        case NormKind::DirectSum: {
            Vec lows(static_cast<int>(s->children.size())), his(lows.size());
            int off = 0, j = 0;
            for (auto& c : s->children) {
                Bound b = norm_enclosure(c, x.segment(off, c->dim));
                lows(j) = b.lo;
                his(j) = b.hi;
                off += c->dim;
                ++j;
            }
            return Bound(lp_combine(s->p, lows), lp_combine(s->p, his));
        }
        case NormKind::Quotient: {
            AffineMinResult r = min_norm_over_affine(s->children[0], s->lift * x, s->kernel);
            return r.bound;
        }
        case NormKind::Pullback:
            return norm_enclosure(s->children[0], s->map * x);
        case NormKind::MaxFunctionals:
            return Bound::point((s->map * x).cwiseAbs().maxCoeff());
        case NormKind::MaxOf: {
            Bound b = norm_enclosure(s->children[0], x);
            for (size_t j = 1; j < s->children.size(); ++j) b = bmax(b, norm_enclosure(s->children[j], x));
            return b;
        }
    }
    throw std::logic_error("norm: unreachable");
}

double norm(const Space& s, const Vec& x) { return norm_enclosure(s, x).hi; }

Space dual_of(const Space& s) {
    if (auto back = s->dual_back.lock()) return back;
    if (s->dual_cache) return s->dual_cache;
    Space d;
    switch (s->kind) {
        case NormKind::Lp: {
            double q = s->p == 1.0 ? kInf : (s->p == kInf ? 1.0 : s->p / (s->p - 1.0));
            d = make_lp(s->dim, q);
            break;
        }
        case NormKind::WeightedLp: {
            if (s->p == 1.0)
                d = make_weighted_lp(kInf, s->weights.cwiseInverse());
            else if (s->p == kInf)
                d = make_weighted_lp(1.0, s->weights.cwiseInverse());
            else {
                double q = s->p / (s->p - 1.0);
                Vec w(s->weights.size());
                for (int i = 0; i < w.size(); ++i) w(i) = std::pow(s->weights(i), -q / s->p);
                d = make_weighted_lp(q, w);
            }
            break;
        }
        case NormKind::DirectSum: {
            double q = s->p == 1.0 ? kInf : (s->p == kInf ? 1.0 : s->p / (s->p - 1.0));
            std::vector<Space> duals;
            for (auto& c : s->children) duals.push_back(dual_of(c));
            d = make_direct_sum(q, std::move(duals));
            break;
        }
        case NormKind::Quotient:
            d = make_pullback(dual_of(s->children[0]), s->proj.transpose());
            break;
        case NormKind::Pullback: {
            const Mat& M = s->map;
            Space dpar = dual_of(s->children[0]);
            if (M.rows() == M.cols()) {
                d = make_pullback(dpar, M.inverse().transpose());
            } else {
                Mat N = orthonormal_nullspace(M.transpose());
                Mat L = M * (M.transpose() * M).inverse();
                d = make_quotient_lift(dpar, N, L, M.transpose());
            }
            break;
        }
        case NormKind::MaxFunctionals: {
            const Mat& F = s->map;
            Space l1 = make_lp(static_cast<int>(F.rows()), 1.0);
            Mat L = F * (F.transpose() * F).inverse();
            if (F.rows() == F.cols()) {
                d = make_pullback(l1, L);
            } else {
                Mat N = orthonormal_nullspace(F.transpose());
                d = make_quotient_lift(l1, N, L, F.transpose());
            }
            break;
        }
        case NormKind::MaxOf: {
            int J = static_cast<int>(s->children.size());
            int dm = s->dim;
            std::vector<Space> duals;
            for (auto& c : s->children) duals.push_back(dual_of(c));
            Space ds = make_direct_sum(1.0, std::move(duals));
            Mat K = Mat::Zero(J * dm, (J - 1) * dm);
            for (int j = 0; j + 1 < J; ++j) {
                K.block(j * dm, j * dm, dm, dm) = Mat::Identity(dm, dm);
                K.block((J - 1) * dm, j * dm, dm, dm) = -Mat::Identity(dm, dm);
            }
            Mat L = Mat::Zero(J * dm, dm);
            L.topRows(dm) = Mat::Identity(dm, dm);
            Mat P = Mat::Zero(dm, J * dm);
            for (int j = 0; j < J; ++j) P.block(0, j * dm, dm, dm) = Mat::Identity(dm, dm);
            d = make_quotient_lift(ds, K, L, P);
            break;
        }
    }
    s->dual_cache = d;
    d->dual_back = s;
    return d;
}

double dual_norm(const Space& s, const Vec& f) { return norm(dual_of(s), f); }

Vec norming_functional(const Space& s, const Vec& x) {
    double nx = norm(s, x);
    if (nx < 1e-300) return Vec::Zero(s->dim);
    if (s->euclid) {
        const Mat& G = *s->euclid;
        Vec gx = G * x;
        double gn = gx.norm();
        if (gn < 1e-300) return Vec::Zero(s->dim);
        return G.transpose() * gx / gn;
    }
    switch (s->kind) {
        case NormKind::Lp: {
            Vec f(s->dim);
            if (s->p == 1.0) {
                for (int i = 0; i < x.size(); ++i) f(i) = x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0);
            } else if (s->p == kInf) {
                int i0 = 0;
                x.cwiseAbs().maxCoeff(&i0);
                f.setZero();
                f(i0) = x(i0) >= 0 ? 1.0 : -1.0;
            } else {
                for (int i = 0; i < x.size(); ++i) {
                    double a = std::fabs(x(i));
                    f(i) = (x(i) >= 0 ? 1.0 : -1.0) * std::pow(a / nx, s->p - 1.0);
                }
            }
            return f;
        }
        case NormKind::WeightedLp: {
            Vec f(s->dim);
            if (s->p == 1.0) {
                for (int i = 0; i < x.size(); ++i)
                    f(i) = s->weights(i) * (x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0));
            } else if (s->p == kInf) {
                int i0 = 0;
                (s->weights.array() * x.array().abs()).matrix().maxCoeff(&i0);
                f.setZero();
                f(i0) = s->weights(i0) * (x(i0) >= 0 ? 1.0 : -1.0);
            } else {
                for (int i = 0; i < x.size(); ++i) {
                    double a = std::fabs(x(i));
                    f(i) = (x(i) >= 0 ? 1.0 : -1.0) * s->weights(i) * std::pow(a, s->p - 1.0) /
                           std::pow(nx, s->p - 1.0);
                }
            }
            return f;
        }
        case NormKind::DirectSum: {
            int J = static_cast<int>(s->children.size());
            Vec nu(J);
            int off = 0;
            for (int j = 0; j < J; ++j) {
                nu(j) = norm(s->children[j], x.segment(off, s->children[j]->dim));
                off += s->children[j]->dim;
            }
            // Outer norming of the part-norm vector under plain Lp.
            Vec lam(J);
            if (s->p == 1.0) {
                lam.setOnes();
            } else if (s->p == kInf) {
                int j0 = 0;
                nu.maxCoeff(&j0);
                lam.setZero();
                lam(j0) = 1.0;
            } else {
                for (int j = 0; j < J; ++j) lam(j) = std::pow(nu(j) / nx, s->p - 1.0);
            }
            Vec f(s->dim);
            off = 0;
            for (int j = 0; j < J; ++j) {
                int dj = s->children[j]->dim;
                f.segment(off, dj) = lam(j) * norming_functional(s->children[j], x.segment(off, dj));
                off += dj;
            }
            return f;
        }
        case NormKind::Quotient: {
            AffineMinResult r = min_norm_over_affine(s->children[0], s->lift * x, s->kernel);
            Vec res = s->lift * x - s->kernel * r.w;
            Vec fp = norming_functional(s->children[0], res);
            return s->lift.transpose() * fp;
        }
        case NormKind::Pullback:
            return s->map.transpose() * norming_functional(s->children[0], s->map * x);
        case NormKind::MaxFunctionals: {
            Vec vals = s->map * x;
            int i0 = 0;
            vals.cwiseAbs().maxCoeff(&i0);
            Vec f = s->map.row(i0).transpose();
            if (vals(i0) < 0) f = -f;
            return f;
        }
        case NormKind::MaxOf: {
            int best = 0;
            double bv = -1;
            for (size_t j = 0; j < s->children.size(); ++j) {
                double v = norm(s->children[j], x);
                if (v > bv) {
                    bv = v;
                    best = static_cast<int>(j);
                }
            }
            return norming_functional(s->children[best], x);
        }
    }
    throw std::logic_error("norming_functional: unreachable");
}

std::vector<LinExpr> apply_matrix(const Mat& M, const std::vector<LinExpr>& v) {
    std::vector<LinExpr> out(M.rows());
    for (int i = 0; i < M.rows(); ++i) {
        LinExpr e;
        for (int j = 0; j < M.cols(); ++j) {
            double a = M(i, j);
            if (a == 0.0) continue;
            e.cst += a * v[j].cst;
            for (auto& t : v[j].terms) e.terms.push_back({t.first, a * t.second});
        }
        out[i] = std::move(e);
    }
    return out;
}

std::vector<LinExpr> vec_to_exprs(const Vec& x) {
    std::vector<LinExpr> out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = LinExpr(x(i));
    return out;
}

void encode_norm_le(LinearProgram& lp, const Space& s, const std::vector<LinExpr>& coords,
                    const LinExpr& bound) {
    if (!s->polyhedral) throw std::invalid_argument("encode_norm_le: space not polyhedral");
    if (static_cast<int>(coords.size()) != s->dim)
        throw std::invalid_argument("encode_norm_le: coord count mismatch");
    auto le = [&lp](const LinExpr& a, const LinExpr& b) { lp.add_le(a, b); };
    switch (s->kind) {
        case NormKind::Lp:
        case NormKind::WeightedLp: {
            bool weighted = s->kind == NormKind::WeightedLp;
            if (s->p == kInf) {
                for (int i = 0; i < s->dim; ++i) {
                    double w = weighted ? s->weights(i) : 1.0;
                    LinExpr wi = coords[i];
                    for (auto& t : wi.terms) t.second *= w;
                    wi.cst *= w;
                    le(wi, bound);
                    le(-wi, bound);
                }
            } else {  // p == 1
                LinExpr total;
                for (int i = 0; i < s->dim; ++i) {
                    int si = lp.add_var(0.0, true);
                    le(coords[i], LinExpr::var(si));
                    le(-coords[i], LinExpr::var(si));
                    total.add(si, weighted ? s->weights(i) : 1.0);
                }
                le(total, bound);
            }
            break;
        }
        case NormKind::DirectSum: {
            int off = 0;
            if (s->p == kInf) {
                for (auto& c : s->children) {
                    std::vector<LinExpr> sub(coords.begin() + off, coords.begin() + off + c->dim);
                    encode_norm_le(lp, c, sub, bound);
                    off += c->dim;
                }
            } else {
                LinExpr total;
                for (auto& c : s->children) {
                    int tj = lp.add_var(0.0, true);
                    std::vector<LinExpr> sub(coords.begin() + off, coords.begin() + off + c->dim);
                    encode_norm_le(lp, c, sub, LinExpr::var(tj));
                    total.add(tj, 1.0);
                    off += c->dim;
                }
                le(total, bound);
            }
            break;
        }
        case NormKind::Quotient: {
            int k = static_cast<int>(s->kernel.cols());
            std::vector<LinExpr> inner = apply_matrix(s->lift, coords);
            std::vector<int> wv(k);
            for (int j = 0; j < k; ++j) wv[j] = lp.add_var(0.0, false);
            for (int i = 0; i < s->kernel.rows(); ++i)
                for (int j = 0; j < k; ++j)
                    if (s->kernel(i, j) != 0.0) inner[i].add(wv[j], -s->kernel(i, j));
            encode_norm_le(lp, s->children[0], inner, bound);
            break;
        }
        case NormKind::Pullback:
            encode_norm_le(lp, s->children[0], apply_matrix(s->map, coords), bound);
            break;
        case NormKind::MaxFunctionals: {
            std::vector<LinExpr> rows = apply_matrix(s->map, coords);
            for (auto& r : rows) {
                le(r, bound);
                le(-r, bound);
            }
            break;
        }
        case NormKind::MaxOf:
            for (auto& c : s->children) encode_norm_le(lp, c, coords, bound);
            break;
    }
}

long encode_row_count(const Space& s) {
    switch (s->kind) {
        case NormKind::Lp:
        case NormKind::WeightedLp:
            return s->p == kInf ? 2L * s->dim : 2L * s->dim + 1;
        case NormKind::DirectSum: {
            long n = s->p == kInf ? 0 : 1;
            for (auto& c : s->children) n += encode_row_count(c);
            return n;
        }
        case NormKind::Quotient:
        case NormKind::Pullback:
            return encode_row_count(s->children[0]);
        case NormKind::MaxFunctionals:
            return 2L * s->map.rows();
        case NormKind::MaxOf: {
            long n = 0;
            for (auto& c : s->children) n += encode_row_count(c);
            return n;
        }
    }
    return 1L << 30;
}

namespace {
constexpr long kMaxEncodeRows = 400;
}

bool lp_encodable(const Space& s) {
    return s->polyhedral && encode_row_count(s) <= kMaxEncodeRows;
}

bool cheap_dual(const Space& s) {
    switch (s->kind) {
        case NormKind::Lp:
        case NormKind::WeightedLp:
            return true;
        case NormKind::DirectSum: {
            for (auto& c : s->children)
                if (!cheap_dual(c)) return false;
            return true;
        }
        case NormKind::Quotient:
            // Dual = pullback of the parent dual: one parent-dual evaluation.
            return cheap_dual(s->children[0]);
        case NormKind::Pullback:
            if (s->map.rows() == s->map.cols()) return cheap_dual(s->children[0]);
            // Dual = quotient of the parent dual: a minimization over the
            // annihilator, affordable only for small parents.
            return s->children[0]->dim <= 24 && cheap_dual(s->children[0]);
        case NormKind::MaxFunctionals:
            return s->map.rows() <= 24;
        case NormKind::MaxOf: {
            // Dual = quotient of the 1-sum of the child duals.
            if (s->dim * static_cast<long>(s->children.size()) > 24) return false;
            for (auto& c : s->children)
                if (!cheap_dual(c)) return false;
            return true;
        }
    }
    return false;
}

std::optional<std::vector<Vec>> enumerate_polytope_vertices(const std::vector<Vec>& rows_in, int d,
                                                            long budget) {
    if (d < 1 || rows_in.empty()) return std::nullopt;
    // Dedupe identical rows.
    std::vector<Vec> rows;
    for (auto& r : rows_in) {
        bool dup = false;
        for (auto& q : rows)
            if ((q - r).cwiseAbs().maxCoeff() < 1e-12) {
                dup = true;
                break;
            }
        if (!dup) rows.push_back(r);
    }
    const int m = static_cast<int>(rows.size());
    if (m < d) return std::nullopt;
    // Count combinations C(m, d) against budget.
    double comb = 1;
    for (int i = 0; i < d; ++i) comb = comb * (m - i) / (i + 1);
    if (comb > double(budget)) return std::nullopt;

    std::vector<Vec> verts;
    std::vector<int> idx(d);
    Mat M(d, d);
    Vec one = Vec::Ones(d);
    std::function<bool(int, int)> rec = [&](int start, int k) -> bool {
        if (k == d) {
            for (int i = 0; i < d; ++i) M.row(i) = rows[idx[i]].transpose();
            Eigen::FullPivLU<Mat> lu(M);
            lu.setThreshold(1e-10);
            if (!lu.isInvertible()) return true;
            Vec x = lu.solve(one);
            for (auto& r : rows)
                if (r.dot(x) > 1.0 + 1e-8) return true;
            for (auto& v : verts)
                if ((v - x).cwiseAbs().maxCoeff() < 1e-9) return true;
            verts.push_back(x);
            return true;
        }
        for (int i = start; i < m; ++i) {
            idx[k] = i;
            if (!rec(i + 1, k + 1)) return false;
        }
        return true;
    };
    rec(0, 0);
    if (verts.empty()) return std::nullopt;
    return verts;
}

std::optional<std::vector<Vec>> ball_facet_normals(const Space& s, long budget) {
    return ball_vertex_span(dual_of(s), budget);
}

std::optional<std::vector<Vec>> ball_vertex_span(const Space& s, long budget) {
    if (s->vertex_cache && s->vertex_cache_budget >= budget) return s->vertex_cache;
    std::optional<std::vector<Vec>> out;
    switch (s->kind) {
        case NormKind::Lp:
        case NormKind::WeightedLp: {
            bool weighted = s->kind == NormKind::WeightedLp;
            int n = s->dim;
            if (s->p == 1.0) {
                std::vector<Vec> v;
                for (int i = 0; i < n; ++i) {
                    Vec e = Vec::Zero(n);
                    e(i) = 1.0 / (weighted ? s->weights(i) : 1.0);
                    v.push_back(e);
                    v.push_back(-e);
                }
                out = std::move(v);
            } else if (s->p == kInf) {
                if (n > 24 || (1L << n) * 2 > budget) break;
                std::vector<Vec> v;
                long total = 1L << n;
                for (long mask = 0; mask < total; ++mask) {
                    Vec e(n);
                    for (int i = 0; i < n; ++i)
                        e(i) = ((mask >> i) & 1 ? 1.0 : -1.0) / (weighted ? s->weights(i) : 1.0);
                    v.push_back(e);
                }
                out = std::move(v);
            }
            break;
        }
        case NormKind::DirectSum: {
            if (s->p == 1.0) {
                std::vector<Vec> v;
                int off = 0;
                bool ok = true;
                for (auto& c : s->children) {
                    auto sub = ball_vertex_span(c, budget);
                    if (!sub) {
                        ok = false;
                        break;
                    }
                    for (auto& u : *sub) {
                        Vec e = Vec::Zero(s->dim);
                        e.segment(off, c->dim) = u;
                        v.push_back(e);
                    }
                    off += c->dim;
                }
                if (ok && static_cast<long>(v.size()) <= budget) out = std::move(v);
            } else if (s->p == kInf) {
                std::vector<std::vector<Vec>> subs;
                double total = 1;
                bool ok = true;
                for (auto& c : s->children) {
                    auto sub = ball_vertex_span(c, budget);
                    if (!sub) {
                        ok = false;
                        break;
                    }
                    total *= double(sub->size());
                    subs.push_back(std::move(*sub));
                }
                if (ok && total <= double(budget)) {
                    std::vector<Vec> v;
                    std::vector<size_t> counter(subs.size(), 0);
                    while (true) {
                        Vec e(s->dim);
                        int off = 0;
                        for (size_t j = 0; j < subs.size(); ++j) {
                            e.segment(off, subs[j][counter[j]].size()) = subs[j][counter[j]];
                            off += static_cast<int>(subs[j][counter[j]].size());
                        }
                        v.push_back(e);
                        size_t j = 0;
                        for (; j < counter.size(); ++j) {
                            if (++counter[j] < subs[j].size()) break;
                            counter[j] = 0;
                        }
                        if (j == counter.size()) break;
                    }
                    out = std::move(v);
                }
            }
            break;
        }
        case NormKind::Quotient: {
            auto par = ball_vertex_span(s->children[0], budget);
            if (par) {
                std::vector<Vec> v;
                for (auto& u : *par) {
                    Vec c = s->proj * u;
                    bool dup = false;
                    for (auto& w : v)
                        if ((w - c).cwiseAbs().maxCoeff() < 1e-12) {
                            dup = true;
                            break;
                        }
                    if (!dup) v.push_back(c);
                }
                out = std::move(v);
            }
            break;
        }
        case NormKind::Pullback: {
            const Mat& M = s->map;
            if (M.rows() == M.cols()) {
                auto par = ball_vertex_span(s->children[0], budget);
                if (par) {
                    Mat Minv = M.inverse();
                    std::vector<Vec> v;
                    for (auto& u : *par) v.push_back(Minv * u);
                    out = std::move(v);
                }
            } else {
                auto fac = ball_facet_normals(s, budget);
                if (fac) out = enumerate_polytope_vertices(*fac, s->dim, budget);
            }
            break;
        }
        case NormKind::MaxFunctionals: {
            std::vector<Vec> rows;
            for (int i = 0; i < s->map.rows(); ++i) {
                rows.push_back(s->map.row(i).transpose());
                rows.push_back(-s->map.row(i).transpose());
            }
            out = enumerate_polytope_vertices(rows, s->dim, budget);
            break;
        }
        case NormKind::MaxOf: {
            std::vector<Vec> rows;
            bool ok = true;
            for (auto& c : s->children) {
                auto fac = ball_facet_normals(c, budget);
                if (!fac) {
                    ok = false;
                    break;
                }
                rows.insert(rows.end(), fac->begin(), fac->end());
            }
            if (ok) out = enumerate_polytope_vertices(rows, s->dim, budget);
            break;
        }
    }
    if (out) {
        s->vertex_cache = out;
        s->vertex_cache_budget = budget;
    }
    return out;
}

// ---- min over affine subspace -------------------------------------------

namespace {

double affine_objective(const Space& s, const Vec& offset, const Mat& span, const Vec& w) {
    return norm(s, offset - span * w);
}

}  // namespace

AffineMinResult min_norm_over_affine(const Space& s, const Vec& offset, const Mat& span,
                                     double tol) {
    AffineMinResult res;
    const int k = static_cast<int>(span.cols());
    if (k == 0) {
        res.bound = norm_enclosure(s, offset);
        res.w = Vec(0);
        return res;
    }
    if (span.rows() != s->dim || offset.size() != s->dim)
        throw std::invalid_argument("min_norm_over_affine: shape mismatch");

    if (s->euclid) {
        const Mat& G = *s->euclid;
        Mat GS = G * span;
        Vec go = G * offset;
        Vec w = GS.colPivHouseholderQr().solve(go);
        double v = (go - GS * w).norm();
        res.bound = Bound(std::max(0.0, v - 1e-12 * (1 + v)), v + 1e-12 * (1 + v));
        res.w = w;
        return res;
    }

    if (lp_encodable(s)) {
        LinearProgram lp;
        std::vector<int> wv(k);
        for (int j = 0; j < k; ++j) wv[j] = lp.add_var(0.0, false);
        int t = lp.add_var(1.0, true);
        std::vector<LinExpr> coords = vec_to_exprs(offset);
        for (int i = 0; i < s->dim; ++i)
            for (int j = 0; j < k; ++j)
                if (span(i, j) != 0.0) coords[i].add(wv[j], -span(i, j));
        encode_norm_le(lp, s, coords, LinExpr::var(t));
        auto r = solve_lp(lp);
        if (!r.ok()) throw std::runtime_error("min_norm_over_affine: LP failed");
        res.w = r.x.head(k);
        double v = r.value;
        res.bound = Bound(std::max(0.0, v - kLpTol), v + kLpTol);
        return res;
    }

    // General convex descent: pattern search from the Euclidean least-squares
    // start, then a dual certificate for the lower bound.
    Vec w = span.colPivHouseholderQr().solve(offset);
    double f = affine_objective(s, offset, span, w);
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
    Rng rng(0x9a93bull);
    for (int e = 0; e < std::min(2 * k, 16); ++e) dirs.push_back(rng.unit_vector(k));

    double scale = std::max(1.0, w.norm());
    double radius = 0.25 * scale;
    const double final_radius = std::max(1e-12, 1e-9 * scale);
    while (radius > final_radius) {
        bool improved = false;
        // A subgradient direction escapes kinks of piecewise-linear norms
        // where the fixed direction set stalls.
        Vec sg = span.transpose() * norming_functional(s, offset - span * w);
        if (sg.norm() > 1e-14) {
            Vec cand = w + radius * (sg / sg.norm());
            double fc = affine_objective(s, offset, span, cand);
            if (fc < f - 1e-15 * (1 + f)) {
                w = cand;
                f = fc;
                improved = true;
            }
        }
        for (auto& d : dirs) {
            for (double sgn : {1.0, -1.0}) {
                Vec cand = w + sgn * radius * d;
                double fc = affine_objective(s, offset, span, cand);
                if (fc < f - 1e-15 * (1 + f)) {
                    w = cand;
                    f = fc;
                    improved = true;
                }
            }
        }
        if (!improved) radius *= 0.5;
    }

    // Cutting-plane refinement. Every evaluation yields a valid affine
    // under-estimator f(w') >= g(r)/|g|* - (span^T g/|g|*) . (w' - w), so the
    // minimum of the cut maximum over a box that provably contains the
    // optimum is a certified global lower bound (Kelley's method).
    double kelley_lower = 0.0;
    if (cheap_dual(s)) {
        Eigen::JacobiSVD<Mat> svd(span);
        double smin = svd.singularValues()(svd.singularValues().size() - 1);
        if (smin > 1e-10) {
            // f(w*) <= f(0) = |offset| forces |span w*|_2 bounded, so
            // |w*|_2 <= (c_lo-bound via Euclid) ... use 2|offset|_2-based box.
            double box = 4.0 * (1.0 + offset.norm() / std::max(smin * s->c_lo, 1e-12)) +
                         4.0 * w.norm();
            struct Cut {
                Vec slope;
                double cst;
            };
            std::vector<Cut> cuts;
            Space dual = dual_of(s);
            auto add_cut = [&](const Vec& wpt) {
                Vec rr = offset - span * wpt;
                double fv = norm(s, rr);
                if (fv < f) {
                    f = fv;
                    w = wpt;
                }
                Vec g = norming_functional(s, rr);
                double gd = norm_enclosure(dual, g).hi;
                if (gd <= 1e-14) return;
                g /= gd;
                Vec slope = -span.transpose() * g;
                // cut(w') = g.rr + slope.(w' - wpt)
                cuts.push_back({slope, g.dot(rr) - slope.dot(wpt)});
            };
            add_cut(w);
            for (int it = 0; it < 160; ++it) {
                LinearProgram lp;
                std::vector<int> wv(k);
                for (int j = 0; j < k; ++j) wv[j] = lp.add_var(0.0, false);
                int t = lp.add_var(1.0, false);
                for (auto& c : cuts) {
                    LinExpr e(c.cst);
                    for (int j = 0; j < k; ++j)
                        if (c.slope(j) != 0.0) e.add(wv[j], c.slope(j));
                    lp.add_le(e, LinExpr::var(t));
                }
                for (int j = 0; j < k; ++j) {
                    lp.add_row(LinExpr::var(wv[j]), LinearProgram::LE, box);
                    lp.add_row(LinExpr::var(wv[j]), LinearProgram::GE, -box);
                }
                lp.add_row(LinExpr::var(t), LinearProgram::GE, 0.0);
                auto sol = solve_lp(lp);
                if (!sol.ok()) break;
                kelley_lower = std::max(kelley_lower, sol.value - kLpTol);
                if (f - kelley_lower <= tol * (1 + f)) break;
                add_cut(sol.x.head(k));
            }
        }
    }

    // Dual certificate: project the norming functional of the residual onto
    // the annihilator of the span, renormalize, evaluate at the offset.
    Vec r = offset - span * w;
    double lower = kelley_lower;
    Vec fr = cheap_dual(s) ? norming_functional(s, r) : Vec(Vec::Zero(s->dim));
    if (fr.norm() > 0) {
        Eigen::HouseholderQR<Mat> qr(span);
        Mat Q = qr.householderQ() * Mat::Identity(s->dim, k);
        Vec g = fr - Q * (Q.transpose() * fr);
        double gd = norm_enclosure(dual_of(s), g).hi;
        if (gd > 1e-12) lower = std::max(lower, g.dot(offset) / gd);
    }
    lower = std::max(lower, 0.0);
    double upper = f * (1 + 1e-12) + 1e-15;
    res.bound = Bound(std::min(lower, upper), upper);
    res.w = w;
    return res;
}

}  // namespace gapkit
