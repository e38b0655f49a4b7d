#pragma once
// Certified distances from a point to a subspace, its unit ball, and its
// unit sphere, in an arbitrary descriptor norm.
#include "subspace.hpp"

namespace gapkit {

struct DistResult {
    Bound bound{0.0, 0.0};
    Vec witness;  // point of the target set achieving the upper bound (ambient coords)
};

// dist(x, Z). Exact (LP) for polyhedral norms, closed form for Euclidean,
// pattern-search descent + dual certificate otherwise.
DistResult dist_to_subspace(const Space& amb, const Vec& x, const Subspace& Z,
                            double tol = kIterTol);

// dist(x, B(Z)) where B(Z) is the unit ball of Z in the ambient norm.
DistResult dist_to_ball(const Space& amb, const Vec& x, const Subspace& Z, double tol = kIterTol);

// dist(x, S(Z)); requires dim(Z) >= 1. Exact for k = 1 (two points), exact
// facet decomposition for polyhedral norms, closed form for Euclidean;
// otherwise a possibly-wide enclosure from descent plus generic lower bounds.
DistResult dist_to_sphere(const Space& amb, const Vec& x, const Subspace& Z,
                          double tol = kIterTol, long facet_budget = 4000);

}  // namespace gapkit
