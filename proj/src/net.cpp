#include "net.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gapkit {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Appends the net for S^{k-1} with Euclidean covering radius <= rho.
// Returns false if max_points would be exceeded.
bool build_net(int k, double rho, long max_points, std::vector<Vec>& out) {
    if (k == 1) {
        if (static_cast<long>(out.size()) + 2 > max_points) return false;
        Vec a(1), b(1);
        a << 1.0;
        b << -1.0;
        out.push_back(a);
        out.push_back(b);
        return true;
    }
    if (k == 2) {
        double half_chord = std::min(1.0, rho / 2.0);
        double step = 4.0 * std::asin(half_chord);
        long M = static_cast<long>(std::ceil(2.0 * kPi / step));
        if (M < 1) M = 1;
        if (static_cast<long>(out.size()) + M > max_points) return false;
        for (long i = 0; i < M; ++i) {
            double a = 2.0 * kPi * double(i) / double(M);
            Vec v(2);
            v << std::cos(a), std::sin(a);
            out.push_back(v);
        }
        return true;
    }
    // k >= 3: polar bands of angular half-width h; within each band a net of
    // the cross-section sphere. Moving to the band center costs a chord <= h,
    // the in-band net costs <= sin(theta) * rho_sub <= rho/2; total <= rho.
    double h = rho / 2.0;
    long n_bands = static_cast<long>(std::ceil(kPi / (2.0 * h)));
    for (long i = 0; i < n_bands; ++i) {
        double theta = (2.0 * double(i) + 1.0) * h;
        if (theta > kPi) theta = kPi;
        double s = std::sin(theta), c = std::cos(theta);
        if (s <= rho / 4.0) {
            if (static_cast<long>(out.size()) + 1 > max_points) return false;
            Vec v = Vec::Zero(k);
            v(0) = c;
            v(1) = s;
            out.push_back(v);
            continue;
        }
        std::vector<Vec> sub;
        if (!build_net(k - 1, std::min(2.0, (rho / 2.0) / s), max_points - static_cast<long>(out.size()),
                       sub))
            return false;
        for (auto& u : sub) {
            Vec v(k);
            v(0) = c;
            v.tail(k - 1) = s * u;
            out.push_back(v);
        }
    }
    return true;
}

}  // namespace

std::vector<Vec> param_sphere_net(int k, double rho) {
    if (k < 1) throw std::invalid_argument("param_sphere_net: k must be >= 1");
    if (!(rho > 0)) throw std::invalid_argument("param_sphere_net: rho must be > 0");
    std::vector<Vec> out;
    if (!build_net(k, rho, 100000000L, out)) throw std::runtime_error("param_sphere_net: too many points");
    return out;
}

SphereNet sphere_net(const Subspace& Y, double mesh, long budget) {
    if (!(mesh > 0)) throw std::invalid_argument("sphere_net: mesh must be > 0");
    if (Y.k() < 1) throw std::invalid_argument("sphere_net: zero subspace has no sphere");
    const Space& amb = Y.ambient;
    const Mat& B = Y.basis;
    const int k = Y.k();

    // L: sup over the parameter Euclidean sphere of ||B u||_ambient.
    std::optional<std::vector<Vec>> facs;
    if (!amb->euclid && amb->polyhedral) facs = ball_facet_normals(amb, 20000);
    double L = amb->c_hi;  // sigma_max(B) = 1 (orthonormal columns)
    if (amb->euclid) {
        Eigen::JacobiSVD<Mat> svd((*amb->euclid) * B);
        L = svd.singularValues()(0);
    } else if (facs) {
        double mx = 0;
        for (auto& g : *facs) mx = std::max(mx, (B.transpose() * g).norm());
        L = mx;
    }
    // m: inf over the parameter sphere of ||B u||_ambient.
    double m = amb->c_lo;
    if (amb->euclid) {
        Eigen::JacobiSVD<Mat> svd((*amb->euclid) * B);
        m = svd.singularValues()(svd.singularValues().size() - 1);
    } else if (amb->polyhedral && k >= 1) {
        auto verts = ball_vertex_span(make_pullback(amb, B), 20000);
        if (verts && !verts->empty()) {
            double mx = 0;
            for (auto& v : *verts) mx = std::max(mx, v.norm());
            if (mx > 0) m = std::max(m, 1.0 / mx);
        } else if (k == 2 && facs && !facs->empty()) {
            // Vertex enumeration was too large; certify the section minimum on
            // a parameter grid instead. ||B u(t)||, u(t) = (cos t, sin t), is
            // L-Lipschitz in t, so a grid of step h bounds the minimum from
            // below by (grid min) - L h / 2. The norm is even in u, so half a
            // period suffices.
            const int nf = static_cast<int>(facs->size());
            Mat C(nf, 2);
            for (int i = 0; i < nf; ++i) C.row(i) = (B.transpose() * (*facs)[i]).transpose();
            const int N = 8192;
            const double h = kPi / N;
            double gmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < N; ++i) {
                double t = (double(i) + 0.5) * h;
                Vec u(2);
                u << std::cos(t), std::sin(t);
                gmin = std::min(gmin, (C * u).cwiseAbs().maxCoeff());
            }
            m = std::max(m, gmin - L * h / 2.0);
        }
    }
    if (!(m > 0)) throw std::runtime_error("sphere_net: degenerate subspace norm");

    // For unit vectors a, b: ||a/||a|| - b/||b|||| <= 2||a - b|| / max(||a||,||b||),
    // so a parameter radius rho certifies an ambient covering of 2*L*rho/m.
    const double factor = 2.0 * L / m;
    double rho = mesh / factor;
    std::vector<Vec> pts;
    bool coarsened = false;
    for (int tries = 0; tries < 80; ++tries) {
        pts.clear();
        if (build_net(k, rho, budget, pts)) break;
        rho *= 1.35;
        coarsened = true;
        pts.clear();
    }
    if (pts.empty()) throw std::runtime_error("sphere_net: budget too small for any net");

    SphereNet net;
    net.requested = mesh;
    net.mesh = factor * rho;
    net.coarsened = coarsened;
    net.points.reserve(pts.size());
    for (auto& u : pts) {
        Vec x = B * u;
        double nx = norm(amb, x);
        net.points.push_back(x / nx);
    }
    return net;
}

}  // namespace gapkit
