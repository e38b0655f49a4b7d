#pragma once
// Deterministic covering nets of unit spheres with certified covering radius.
#include "subspace.hpp"

namespace gapkit {

struct SphereNet {
    std::vector<Vec> points;  // ambient coordinates, ambient norm 1 (+-1e-12)
    double mesh = 0.0;        // certified covering radius of S(Y) in the ambient norm
    double requested = 0.0;   // mesh that was asked for
    bool coarsened = false;   // true if the point budget forced mesh > requested
};

// Net on the Euclidean unit sphere S^{k-1} with covering radius <= rho
// (proved by the recursive band construction). Deterministic.
std::vector<Vec> param_sphere_net(int k, double rho);

// Covering net of S(Y) in the ambient norm. The parameter net's Euclidean
// radius is converted to an ambient covering radius via explicit
// equivalence constants between coefficient l2 and the ambient norm on Y.
SphereNet sphere_net(const Subspace& Y, double mesh, long budget = 200000);

}  // namespace gapkit
