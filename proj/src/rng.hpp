#pragma once
// Deterministic seeded RNG. Transforms are written out explicitly so that a
// given seed produces the same stream on any conforming toolchain.
#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace gapkit {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    int uniform_int(int n) {  // in [0, n)
        return static_cast<int>(eng_() % static_cast<std::uint64_t>(n));
    }

    // Standard normal via Box-Muller (cached second value).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    Eigen::VectorXd gaussian_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = normal();
        return v;
    }

    // Uniform direction on the Euclidean unit sphere.
    Eigen::VectorXd unit_vector(int dim) {
        Eigen::VectorXd v = gaussian_vector(dim);
        double n = v.norm();
        while (n < 1e-12) {
            v = gaussian_vector(dim);
            n = v.norm();
        }
        return v / n;
    }

    Eigen::MatrixXd gaussian_matrix(int rows, int cols) {
        Eigen::MatrixXd m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = normal();
        return m;
    }

    // Random k-dimensional subspace basis (orthonormal columns).
    Eigen::MatrixXd subspace_basis(int dim, int k) {
        Eigen::MatrixXd g = gaussian_matrix(dim, k);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, k);
        return q;
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace gapkit
