#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obsdict/dynamics.hpp"
#include "obsdict/model.hpp"

namespace obsdict {

struct RowIndex {
  bool continuous = false;
  long step = 0;      // discrete kinds
  double time = 0.0;  // continuous kinds
  std::size_t sample = 0;
};

/// Finite realization of the observability map. Rows are time-major, then in
/// sampling-family order; row (t_j, g) = sqrt(w_j) g^H e^{t_j A} and
/// row (k, g) = g^H A^k, so that ||Psi x||^2 is the (quadrature) frame sum.
struct ObservabilityMatrix {
  Matrix matrix;
  std::vector<RowIndex> index_map;
  std::vector<double> row_weights;  // sqrt(w_j), or 1 for discrete kinds
  std::optional<TailCertificate> tail;
};

ObservabilityMatrix observability_matrix(const SystemSpec& sys);
/// Psi on an explicit time grid (continuous dynamics).
ObservabilityMatrix observability_matrix(const SystemSpec& sys, const QuadratureGrid& grid);

/// Q = Psi^H Psi, symmetrized.
Matrix grammian(const ObservabilityMatrix& psi);
Matrix grammian(const SystemSpec& sys);

enum class Horizon { kDiscreteInfinite, kContinuousInfinite };

/// Exact infinite-horizon Grammian of a diagonalizable system from the Cauchy
/// sums 1/(1 - conj(mu_n) mu_m) or -1/(conj(mu_n) + mu_m). Throws
/// ConvergenceError outside the stable regime.
Matrix grammian_closed_form_diagonal(const DiagonalizableSystem& sys, const SamplingFamily& family,
                                     Horizon kind);

struct Tolerances {
  double eob_rel_tol = 1e-10;              // frame_eob <=> c1 > eob_rel_tol * c2
  std::optional<double> rank_rel_tol;      // default max(dim) * eps
  double delta_floor = 1e-6;
  double c1_floor = 1e-6;
  double c2_cap = 1e6;
  double epsilon_guard = 1e-6;
  int trend_window = 0;                    // 0 => max(5, N/4)
  double trend_tol = 0.05;
  double trend_ratio = 0.5;
  double diag_tol = 1e-8;                  // condition cap 1/diag_tol
  double bessel_tol = 1e-10;
};

struct FrameVerdicts {
  bool bessel_admissible = false;
  bool complete_aob = false;
  bool frame_eob = false;
};

struct FrameReport {
  double c1 = 0.0;
  double c2 = 0.0;
  Eigen::Index rank = 0;
  /// c2 / c1; nullopt when c1 <= 0.
  std::optional<double> condition_number;
  FrameVerdicts verdicts;
  std::optional<TailCertificate> tail_certificate;
};

FrameReport frame_report_from_grammian(const Matrix& q, const Tolerances& tol);
FrameReport frame_report(const SystemSpec& sys, const Tolerances& tol = {});

struct AdmissibilityCheck {
  double c2 = 0.0;
  double bound = 0.0;
  bool satisfied = false;
  std::string form;  // "finite" or "infinite"
};

/// Continuous kinds only: c2 against (e^{2||A|| tau} - 1)/(2||A||) ||B||^2, or
/// -||B||^2 / (2 omega) at infinite time with omega the logarithmic norm.
AdmissibilityCheck admissibility_bound_check(const SystemSpec& sys);
double admissibility_bound_finite(double a_norm, double tau, double b_norm);

struct Reconstruction {
  Vector x0;
  double residual = 0.0;
};

/// x0 = Q^{-1} Psi^H y. Refuses with NotObservableError unless frame_eob.
Reconstruction reconstruct(const SystemSpec& sys, const Vector& y, const Tolerances& tol = {});

struct DualityReport {
  double adjoint_identity_error = 0.0;  // ||Psi^H - Theta_dual R||
  double unreflected_error = 0.0;       // ||Psi^H - Theta_dual||
  bool reflection_needed = false;
  double sigma_min_psi = 0.0;
  double sigma_min_dual = 0.0;
  bool eob = false;
  bool aob = false;
  bool dual_eco = false;
  bool dual_aco = false;
  bool eob_iff_dual_eco = false;
  bool aob_iff_dual_aco = false;
};

/// The dual pair (A^H, B^H) with the same time domain.
SystemSpec dual_system(const SystemSpec& sys);

DualityReport duality_check(const SystemSpec& sys, const Tolerances& tol = {});

/// dim-th singular value (0 when fewer exist).
double sigma_min_of(const Matrix& m, Eigen::Index dim);

}  // namespace obsdict
