#pragma once
// Subspaces of a normed space, annihilators, and induced norms.
#include "space.hpp"

namespace gapkit {

struct Subspace {
    Space ambient;
    Mat basis;  // ambient_dim x k, orthonormal columns; k == 0 encodes {0}

    int k() const { return static_cast<int>(basis.cols()); }
    int ambient_dim() const { return ambient->dim; }
};

// Orthonormalizes the spanning columns (rank-revealing; rank tolerance is
// 1e-10 x largest singular value). A 0-column matrix gives the zero subspace.
Subspace make_subspace(const Space& ambient, const Mat& span_cols);
Subspace zero_subspace(const Space& ambient);

// The subspace with the restriction of the ambient norm, as a Space on the
// k coefficient coordinates (norm(w) = ambient_norm(basis*w)). Requires k >= 1.
Space induced_space(const Subspace& Y);

// Annihilator Y-perp inside the dual space.
Subspace annihilator(const Subspace& Y);

// dist(x, Y) under the Euclidean auxiliary norm <= tol.
bool membership(const Subspace& Y, const Vec& x, double tol);

// Orthonormal basis of the Euclidean complement of Y.
Mat complement_basis(const Subspace& Y);

// span(A) + span(B) and span(A) intersect span(B), as subspaces.
Subspace subspace_sum(const Subspace& A, const Subspace& B);
Subspace subspace_intersection(const Subspace& A, const Subspace& B);

}  // namespace gapkit
