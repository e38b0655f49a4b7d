#pragma once
// Operator opening r0/r between subspaces, the metric d_op, minimal
// projection constants, and the related perturbation checks.
#include <optional>
#include <string>

#include "opnorm.hpp"

namespace gapkit {

struct OperatorGapReport {
    Bound bound;                 // [certified lower, best certified upper]
    std::optional<Mat> witness;  // invertible C with C(Y) = Z achieving upper
    std::string upper_route;     // which upper-bound path won and how it was certified
    double lower() const { return bound.lo; }
    double upper() const { return bound.hi; }
};

// One-sided operator opening r0(Y,Z) = inf{||C - I|| : C invertible, C(Y) = Z},
// capped at 1. Lower bound from the one-sided opening; upper from the
// projection-difference route and a seeded multistart over maps sending
// basis(Y) into basis(Z) with a free near-identity complement action.
OperatorGapReport r0_bounds(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// Symmetric r(Y,Z) = max of the two one-sided openings.
OperatorGapReport r_bounds(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// d_op(Y,Z) = log(1 + r(Y,Z) upper bound).
double dop_metric(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

struct InverseBoundReport {
    bool applicable = false;  // needs an upper bound u < 1 with a witness
    double u = 1.0;           // certified ||C - I|| upper bound
    double lhs = 0.0;         // certified ||C^{-1} - I|| upper bound
    double rhs = 0.0;         // u/(1-u) + tol
    bool ok = false;
};

// Checks ||C^{-1} - I|| <= u/(1-u) + tol for an explicit invertible C on the
// ambient space, with u a certified upper bound on ||C - I||.
InverseBoundReport inverse_bound_check(const Space& ambient, const Mat& C,
                                       const ComputeCfg& cfg = {});
// Same, with C taken from the r0 witness of the pair; inapplicable when the
// search ends at the trivial cap.
InverseBoundReport inverse_bound_check(const Subspace& Y, const Subspace& Z,
                                       const ComputeCfg& cfg = {});

struct LambdaReport {
    Bound bound;            // encloses lambda(Y, X) = inf ||P|| over projections onto Y
    Mat witness_projection; // P achieving the upper bound
    std::string route;      // how the operator norms were certified
};

LambdaReport lambda_proj(const Subspace& Y, const ComputeCfg& cfg = {});

struct Prop53Report {
    bool applicable = false;  // requires omega_hi * lambda_hi < 1
    double omega_hi = 0.0;    // Omega(Z, Y) upper bound
    double lambda_hi = 0.0;   // lambda(Y, X) upper bound
    double r0_hi = 1.0;       // r0(Y, Z) upper bound
    double rhs = 0.0;         // bound implied by the pessimistic inputs
    bool ok = false;
    std::string note;
};

Prop53Report prop53_check(const Subspace& Y, const Subspace& Z, const ComputeCfg& cfg = {});

// Dual upper bound certified by the adjoint of the primal witness:
// r0(ann Z, ann Y) <= ||C^T - I|| in the dual operator norm. Empty when the
// primal search produced no witness.
std::optional<double> r0_adjoint_dual_upper(const Subspace& Y, const Subspace& Z,
                                            const ComputeCfg& cfg = {});

}  // namespace gapkit
