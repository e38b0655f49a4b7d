#pragma once
// Openings (gaps) between subspaces: one-sided and symmetric openings, the
// spherical and ball openings, inclination, and the log-gap metric, each
// reported as a certified enclosure with the method that produced it.
#include "dist.hpp"
#include "net.hpp"

namespace gapkit {

enum class GapMethod { PolyhedralExact, SpectralExact, CertifiedNet, Multistart };

const char* gap_method_name(GapMethod m);

enum class ForceRoute { Auto, ForceNet, ForceExact };

struct ComputeCfg {
    // Target covering radius for net routes. NaN means dimension-based
    // default: 5e-3 for dim(Y) <= 2, 2e-2 for dim 3, 0.15 for dim 4.
    double mesh = std::numeric_limits<double>::quiet_NaN();
    long budget = 200000;  // vertex / net point budget
    double tol = 1e-6;     // iterative solver tolerance
    unsigned long long seed = 1;
    ForceRoute force = ForceRoute::Auto;
};

struct GapReport {
    Bound bound{0.0, 0.0};
    GapMethod method = GapMethod::PolyhedralExact;
    std::optional<double> mesh;  // certified covering radius when method is CertifiedNet
    Vec witness;                 // ambient point achieving (approximately) the reported value

    double lower() const { return bound.lo; }
    double upper() const { return bound.hi; }
    double value() const { return bound.mid(); }
};

// sup_{y in S(Y)} dist(y, Z); 0 when Y = {0} (supremum over the empty set).
GapReport theta0(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// Symmetric opening: max of the two one-sided openings.
GapReport theta(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// Hausdorff distance between unit spheres; falls back to theta when Y or Z
// is the zero subspace.
GapReport omega(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// Ball opening: sup dist(y, B(Z)) symmetrized; same zero-subspace fallback.
GapReport lambda_gap(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// Inclination of Z to Y: inf_{z in S(Z)} dist(z, Y). Z must be nonzero.
GapReport inclination(const Subspace& Z, const Subspace& Y, const ComputeCfg& cfg = {});

// log(1 + theta), enclosure mapped monotonically.
GapReport dg_metric(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// ||P_Y - P_Z|| for an inner-product ambient norm; exact to machine precision.
double hilbert_theta(const Subspace& Y, const Subspace& Z);

struct DualityReport {
    GapReport primal;  // theta0(Y, Z)
    GapReport dual;    // theta0(Z-perp, Y-perp) in the dual space
    bool overlap = false;
};

// Checks theta0(Y,Z) = theta0(Z-perp, Y-perp) by enclosure overlap.
DualityReport duality_check(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

struct BorsukResult {
    Vec witness;
    double value = 0.0;
    GapReport report;
};

// Extremal vector for dim(Y) > dim(Z): a point of S(Y) with dist(y, Z)
// within mesh + tol of 1. Errors unless dim(Y) > dim(Z).
BorsukResult borsuk_extremal(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

}  // namespace gapkit
