#include "subspace.hpp"

#include <stdexcept>

namespace gapkit {

namespace {

Mat orth_cols(const Mat& A) {
    if (A.cols() == 0) return Mat(A.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > kRankTolFactor * std::max(smax, 1.0)) ++r;
    return svd.matrixU().leftCols(r);
}

}  // namespace

Subspace make_subspace(const Space& ambient, const Mat& span_cols) {
    if (span_cols.rows() != ambient->dim && span_cols.cols() != 0)
        throw std::invalid_argument("subspace: basis row count != ambient dim");
    Subspace s;
    s.ambient = ambient;
    s.basis = span_cols.cols() == 0 ? Mat(ambient->dim, 0) : orth_cols(span_cols);
    return s;
}

Subspace zero_subspace(const Space& ambient) {
    Subspace s;
    s.ambient = ambient;
    s.basis = Mat(ambient->dim, 0);
    return s;
}

Space induced_space(const Subspace& Y) {
    if (Y.k() < 1) throw std::invalid_argument("induced_space: zero subspace has no unit sphere");
    return make_pullback(Y.ambient, Y.basis);
}

Subspace annihilator(const Subspace& Y) {
    Space dual = dual_of(Y.ambient);
    if (Y.k() == 0) {
        Subspace s;
        s.ambient = dual;
        s.basis = Mat::Identity(dual->dim, dual->dim);
        return s;
    }
    // ker(B^T) = (range B)-perp
    Eigen::JacobiSVD<Mat> svd(Y.basis.transpose(), Eigen::ComputeFullV);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > kRankTolFactor * std::max(smax, 1.0)) ++r;
    Subspace s;
    s.ambient = dual;
    s.basis = svd.matrixV().rightCols(Y.ambient_dim() - r);
    return s;
}

bool membership(const Subspace& Y, const Vec& x, double tol) {
    if (x.size() != Y.ambient_dim()) throw std::invalid_argument("membership: dim mismatch");
    if (Y.k() == 0) return x.norm() <= tol;
    Vec res = x - Y.basis * (Y.basis.transpose() * x);
    return res.norm() <= tol;
}

Mat complement_basis(const Subspace& Y) {
    if (Y.k() == 0) return Mat::Identity(Y.ambient_dim(), Y.ambient_dim());
    Eigen::JacobiSVD<Mat> svd(Y.basis.transpose(), Eigen::ComputeFullV);
    return svd.matrixV().rightCols(Y.ambient_dim() - Y.k());
}

Subspace subspace_sum(const Subspace& A, const Subspace& B) {
    Mat stacked(A.ambient_dim(), A.k() + B.k());
    if (A.k()) stacked.leftCols(A.k()) = A.basis;
    if (B.k()) stacked.rightCols(B.k()) = B.basis;
    return make_subspace(A.ambient, stacked);
}

Subspace subspace_intersection(const Subspace& A, const Subspace& B) {
    // x in A cap B  <=>  x = A u = B v; solve [A -B][u;v] = 0.
    if (A.k() == 0 || B.k() == 0) return zero_subspace(A.ambient);
    Mat M(A.ambient_dim(), A.k() + B.k());
    M.leftCols(A.k()) = A.basis;
    M.rightCols(B.k()) = -B.basis;
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    double smax = svd.singularValues()(0);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > kRankTolFactor * std::max(smax, 1.0)) ++r;
    Mat null = svd.matrixV().rightCols(A.k() + B.k() - r);
    if (null.cols() == 0) return zero_subspace(A.ambient);
    return make_subspace(A.ambient, A.basis * null.topRows(A.k()));
}

}  // namespace gapkit
