#pragma once

// Systems, operators, spectra, sampling families and time domains, plus the
// dense linear-algebra substrate (exponentials, powers, eigen-decomposition,
// stability classification).

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace obsdict {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

bool all_finite(const Matrix& m);

/// Square dense operator on C^dim. Construction rejects empty, non-square and
/// non-finite input.
class Operator {
 public:
  explicit Operator(Matrix entries);
  static Operator identity(Eigen::Index dim);
  static Operator diagonal(const std::vector<Complex>& diag);

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

/// Eigenvalues of A stored in the direct convention A phi_n = mu_n phi_n.
/// The criteria read `lambda_view()`, which is the opposite-sign view
/// A phi_n = -lambda_n phi_n.
class Spectrum {
 public:
  explicit Spectrum(std::vector<Complex> mu);
  static Spectrum from_lambda(const std::vector<Complex>& lambda);

  const std::vector<Complex>& mu() const { return mu_; }
  std::vector<Complex> lambda_view() const;
  std::size_t size() const { return mu_.size(); }

 private:
  std::vector<Complex> mu_;
};

/// A = V diag(mu) V^{-1}. Without a basis the system is diagonal in the
/// standard orthonormal basis.
class DiagonalizableSystem {
 public:
  explicit DiagonalizableSystem(Spectrum spectrum,
                                std::optional<Matrix> basis = std::nullopt);

  const Spectrum& spectrum() const { return spectrum_; }
  const std::optional<Matrix>& basis() const { return basis_; }
  const std::vector<double>& basis_norms() const { return basis_norms_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(spectrum_.size()); }

  /// Eigenvector matrix, identity when no basis was supplied.
  Matrix basis_or_identity() const;
  /// 2-norm condition number of the eigenvector matrix.
  double basis_condition() const;
  Matrix dense() const;

 private:
  Spectrum spectrum_;
  std::optional<Matrix> basis_;
  std::vector<double> basis_norms_;
};

/// The set G of sampling vectors.
class SamplingFamily {
 public:
  SamplingFamily(std::vector<Vector> vectors, std::vector<std::string> labels);
  explicit SamplingFamily(std::vector<Vector> vectors);

  const std::vector<Vector>& vectors() const { return vectors_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return vectors_.size(); }
  Eigen::Index dim() const { return vectors_.front().size(); }

 private:
  std::vector<Vector> vectors_;
  std::vector<std::string> labels_;
};

/// B x = (<x, g>)_g, i.e. row g of the matrix is g^H.
class ObservationOperator {
 public:
  static ObservationOperator from_family(const SamplingFamily& family);
  explicit ObservationOperator(Matrix rows);

  const Matrix& matrix() const { return rows_; }
  SamplingFamily to_family(std::vector<std::string> labels) const;

 private:
  Matrix rows_;
};

struct DiscreteFinite {
  long gamma = 0;
};
struct DiscreteInfinite {
  long truncation = 1;
  double tail_tol = 1e-12;
};
struct ContinuousFinite {
  double tau = 1.0;
  int panels = 8;
  int nodes_per_panel = 8;
};
struct ContinuousInfinite {
  double horizon = 1.0;
  int panels = 8;
  int nodes_per_panel = 8;
  double tail_tol = 1e-12;
};

using TimeDomain =
    std::variant<DiscreteFinite, DiscreteInfinite, ContinuousFinite, ContinuousInfinite>;

void validate_time_domain(const TimeDomain& time);
bool is_continuous(const TimeDomain& time);
bool is_infinite(const TimeDomain& time);
std::string time_kind_name(const TimeDomain& time);

using Dynamics = std::variant<Operator, DiagonalizableSystem>;

class SystemSpec {
 public:
  SystemSpec(Dynamics dynamics, SamplingFamily sampling, TimeDomain time,
             std::optional<Matrix> control = std::nullopt);

  const Dynamics& dynamics() const { return dynamics_; }
  const SamplingFamily& sampling() const { return sampling_; }
  const TimeDomain& time() const { return time_; }
  const std::optional<Matrix>& control() const { return control_; }

  Eigen::Index dim() const { return dense_.rows(); }
  /// Dense matrix of A regardless of how the dynamics were given.
  const Matrix& a() const { return dense_; }
  /// Observation matrix B (rows g^H).
  const Matrix& b() const { return observation_; }
  const DiagonalizableSystem* diagonal() const {
    return std::get_if<DiagonalizableSystem>(&dynamics_);
  }

  SystemSpec with_time(TimeDomain time) const;

 private:
  Dynamics dynamics_;
  SamplingFamily sampling_;
  TimeDomain time_;
  std::optional<Matrix> control_;
  Matrix dense_;
  Matrix observation_;
};

// ---- linear algebra ----------------------------------------------------

double spectral_norm(const Matrix& m);
std::vector<double> singular_values(const Matrix& m);
/// Number of singular values above max(rows, cols) * eps * sigma_max, or above
/// `rel_tol * sigma_max` when `rel_tol` is given.
Eigen::Index numerical_rank(const Matrix& m, std::optional<double> rel_tol = std::nullopt);

/// e^{tA} by scaling and squaring of the truncated Taylor series.
Matrix matrix_exponential(const Matrix& a, double t);
Matrix matrix_exponential(const Operator& a, double t);

/// A^k by repeated squaring; A^0 = I.
Matrix operator_power(const Matrix& a, unsigned long k);

/// Eigen-decomposition with a conditioning certificate: throws
/// NotDiagonalizableError when cond(V) > 1/tol or the reconstruction residual
/// exceeds tol * ||A||.
DiagonalizableSystem spectral_decomposition(const Matrix& a, double tol = 1e-8);

std::vector<Complex> eigenvalues(const Matrix& a);

struct StabilityInfo {
  bool exponentially_stable = false;
  double omega = 0.0;  // max Re sigma(A)
  bool strongly_stable = false;
  double spectral_radius = 0.0;
};

StabilityInfo stability_classification(const Spectrum& spectrum);
StabilityInfo stability_classification(const Matrix& a);

/// Logarithmic 2-norm, the largest eigenvalue of (A + A^H)/2.
double log_norm(const Matrix& a);

}  // namespace obsdict
