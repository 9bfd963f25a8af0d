#pragma once

// Infinite-time exact-observability criteria for diagonalizable systems with a
// single sampling vector b. Eigenvalues here are always in the opposite-sign
// convention A phi_n = -lambda_n phi_n. Every criterion is evaluated on the
// supplied finite section: a pass is evidence, not proof.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "obsdict/model.hpp"
#include "obsdict/observability.hpp"

namespace obsdict {

/// lambda_n (opposite-sign eigenvalues), <b, phi_n>, ||phi_n||.
class EigenSamplePair {
 public:
  EigenSamplePair(std::vector<Complex> lambdas, std::vector<Complex> coeffs,
                  std::vector<double> norms);
  /// From a diagonalizable system and sampling vector b.
  static EigenSamplePair from_system(const DiagonalizableSystem& sys, const Vector& b);

  const std::vector<Complex>& lambdas() const { return lambdas_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  const std::vector<double>& norms() const { return norms_; }
  std::size_t size() const { return lambdas_.size(); }

 private:
  std::vector<Complex> lambdas_;
  std::vector<Complex> coeffs_;
  std::vector<double> norms_;
};

enum class Regime { kDiscDiscrete, kHalfplaneContinuous, kFiniteContinuous };

std::string regime_name(Regime regime);
Regime parse_regime(const std::string& name);

struct CarlesonResult {
  double inf_product = 1.0;
  std::size_t argmin_index = 0;
  bool pass = false;
  std::vector<std::pair<std::size_t, std::size_t>> duplicate_pairs;
};

/// |(z - w) / (1 - conj(z) w)|.
double disc_factor(Complex z, Complex w);
/// |(z - w) / (z + conj(w))| for Re z, Re w > 0.
double halfplane_factor(Complex z, Complex w);

/// inf_n prod_{k != n} of the pseudo-hyperbolic factors, accumulated in log
/// magnitude. Duplicates give 0. DomainError unless every |lambda| < 1
/// (resp. Re lambda > 0).
CarlesonResult carleson_disc(const std::vector<Complex>& lambdas, double delta_floor = 1e-6);
CarlesonResult carleson_halfplane(const std::vector<Complex>& lambdas, double delta_floor = 1e-6);

struct NormRatioResult {
  std::vector<double> ratios;
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  bool bounds_ok = false;  // c1_hat > floor and c2_hat < cap
  bool decaying = false;   // tail drifts toward 0
  bool growing = false;    // tail drifts toward infinity
  bool pass = false;
  /// finite-continuous: sup |Re lambda_n|.
  std::optional<double> sup_abs_real;
};

/// ratios[n] = |<b, phi_n>| / (||phi_n|| w_n) with w_n = sqrt(1 - |lambda_n|^2),
/// sqrt(2 Re lambda_n) or 1.
NormRatioResult norm_ratio_condition(const EigenSamplePair& pair, Regime regime,
                                     const Tolerances& tol = {});

/// Closed-form ||E_n||^2 for E_n = Psi phi_n, given ||B phi_n||.
double en_norm_squared(Complex lambda, double b_phi_norm, Regime regime,
                       std::optional<double> tau = std::nullopt);

struct Condition {
  std::string name;
  bool pass = false;
  double witness = 0.0;
  std::optional<std::size_t> witness_index;
  std::string note;
};

struct CriteriaReport {
  Regime regime = Regime::kDiscDiscrete;
  std::vector<Condition> conditions;
  bool overall = false;
  std::vector<std::pair<std::size_t, std::size_t>> duplicate_pairs;
};

/// The four one-vector frame conditions in the disc.
CriteriaReport one_point_frame_check(const EigenSamplePair& pair, const Tolerances& tol = {});
/// The four conditions for continuous infinite time, condition 3 via the
/// half-plane Carleson condition.
CriteriaReport continuous_infinite_check(const EigenSamplePair& pair, const Tolerances& tol = {});

/// M(z) = (1 - z) / (1 + z).
Complex mobius(Complex z);

struct MobiusTransfer {
  EigenSamplePair halfplane_pair;
  double identity_residual = 0.0;
};

/// lambda'_n = M(lambda_n), <b~, phi_n> = sqrt(2)/|1 + lambda_n| <b, phi_n>.
/// GuardViolationError when |1 + lambda_n| <= epsilon_guard.
MobiusTransfer mobius_transfer(const EigenSamplePair& pair, double epsilon_guard = 1e-6);

struct InclusionReport {
  bool inside = false;
  std::string region;
  double alpha = 0.0;
  std::vector<std::size_t> offenders;
};

/// Necessary spectral location per regime: |lambda| < 1, 0 < Re lambda < alpha,
/// or |Re lambda| < alpha.
InclusionReport spectrum_inclusion_report(const std::vector<Complex>& lambdas, Regime regime);

/// Resolved trend window for a sequence of length n.
std::size_t trend_window_for(std::size_t n, const Tolerances& tol);

}  // namespace obsdict
