#pragma once
// Linear maps between normed spaces: operator norm and minimum modulus.
#include "openings.hpp"

namespace gapkit {

struct LinearMap {
    Space domain;    // dim n
    Space codomain;  // dim m
    Mat A;           // m x n
};

LinearMap make_linear_map(const Space& domain, const Space& codomain, const Mat& A);

// Orthonormal basis of ker A (Euclidean), residual <= 1e-10.
Mat kernel_basis(const LinearMap& T);

// ||T|| = sup over the domain ball. Exact by vertex enumeration on polyhedral
// domains, singular-value formula when both sides are inner-product norms,
// Lipschitz-inflated net/sampled enclosure otherwise.
Bound op_norm(const LinearMap& T, const ComputeCfg& cfg = {});

// gamma(T) = sup{c : ||Tx|| >= c dist(x, ker T)}; computed on the quotient by
// the kernel. The zero map (full kernel) gets the infinite marker.
Bound min_modulus(const LinearMap& T, const ComputeCfg& cfg = {});

inline bool is_infinite_bound(const Bound& b) { return std::isinf(b.lo) && std::isinf(b.hi); }

}  // namespace gapkit
