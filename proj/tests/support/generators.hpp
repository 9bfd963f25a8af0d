#pragma once

// Seeded generators for property tests and independent numerical oracles.
// The oracles deliberately avoid the library's own code paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "obsdict/model.hpp"

namespace obsdict::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  Complex cnormal() { return {normal(), normal()}; }

  Matrix matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }
  Vector vector(Eigen::Index n) { return matrix(n, 1).col(0); }

  /// Uniform point in the disc of radius r.
  Complex in_disc(double r) {
    const double rad = r * std::sqrt(uniform(0.0, 1.0));
    return std::polar(rad, uniform(-M_PI, M_PI));
  }

  /// A with ||A|| scaled to `norm`.
  Matrix scaled(Eigen::Index n, double norm) {
    Matrix a = matrix(n, n);
    const double s = Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
    return a * (norm / s);
  }

  /// Similarity-conjugated Jordan-type matrix with a defective block.
  Matrix defective(Eigen::Index n, double scale) {
    Matrix j = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) j(i, i) = Complex(uniform(-scale, scale), uniform(-scale, scale));
    if (n >= 2) {
      j(1, 1) = j(0, 0);
      j(0, 1) = 1.0;
    }
    Matrix p = matrix(n, n) + 2.0 * Matrix::Identity(n, n);
    return p * j * p.inverse();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// e^{tA} by classical RK4 on X' = AX; an
/// oracle independent of the scaling-and-squaring code.
inline Matrix expm_rk4(const Matrix& a, double t, int steps = 4096) {
  const double h = t / steps;
  Matrix x = Matrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < steps; ++i) {
    const Matrix k1 = a * x;
    const Matrix k2 = a * (x + 0.5 * h * k1);
    const Matrix k3 = a * (x + 0.5 * h * k2);
    const Matrix k4 = a * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double rel_frobenius(const Matrix& x, const Matrix& ref) {
  return (x - ref).norm() / std::max(ref.norm(), 1e-300);
}

inline double lambda_min_hermitian(const Matrix& q) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}
inline double lambda_max_hermitian(const Matrix& q) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

/// Diagonal system in the standard basis.
inline SystemSpec diag_system(const std::vector<Complex>& mu, const std::vector<Vector>& samples,
                              TimeDomain time) {
  return SystemSpec(DiagonalizableSystem(Spectrum(mu)), SamplingFamily(samples), time);
}

inline SystemSpec dense_system(const Matrix& a, const std::vector<Vector>& samples, TimeDomain time,
                               std::optional<Matrix> control = std::nullopt) {
  return SystemSpec(Operator(a), SamplingFamily(samples), time, std::move(control));
}

inline Vector vec(std::initializer_list<Complex> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (const Complex& x : xs) v(i++) = x;
  return v;
}

}  // namespace obsdict::testing
