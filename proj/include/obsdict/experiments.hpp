#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obsdict/observability.hpp"

namespace obsdict {

struct SweepRow {
  double delta = 0.0;
  FrameReport report;
  double c1_gap = 0.0;
  double c2_gap = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending delta
  FrameReport reference;
  /// Largest delta such that every grid with spacing <= it is a frame.
  std::optional<double> threshold_delta;
  bool all_frames = false;
};

/// Uniform left-endpoint grids {0, delta, 2 delta, ...} on [0, tau), each node
/// weighted by delta, compared with the quadrature baseline.
SweepResult discretization_sweep(const SystemSpec& sys, std::vector<double> deltas,
                                 const Tolerances& tol = {});

/// TSV: delta, c1, c2, c1_ref_gap, c2_ref_gap, verdict.
std::string sweep_tsv(const SweepResult& sweep);

struct KalmanReport {
  std::vector<Eigen::Index> ranks;  // rank Q_tau per tau
  Eigen::Index discrete_rank = 0;   // K-truncated discrete Grammian
  Eigen::Index kalman_rank = 0;     // rows B, BA, ..., BA^{n-1}
  long truncation = 0;
  bool all_equal = false;
};

Matrix kalman_matrix(const Matrix& a, const Matrix& b);

/// Ranks of Q_tau over `taus` (Gauss-Legendre panels x nodes), of the
/// discrete Grammian truncated at K (raised to n-1 if smaller) and of the
/// Kalman matrix. Each is counted on singular values of Psi (resp. the Kalman
/// matrix) cut at sqrt(rank_rel_tol), the sigma scale of the Q threshold.
KalmanReport kalman_independence(const SystemSpec& sys, const std::vector<double>& taus,
                                 long truncation, const Tolerances& tol = {}, int panels = 8,
                                 int nodes_per_panel = 8);

struct SelfAdjointReport {
  std::vector<double> taus;
  std::vector<bool> frame_verdicts;
  std::vector<double> c1_curve;
  bool all_agree = false;
};

/// frame_eob at each tau for Hermitian A; NotSelfAdjointError otherwise.
SelfAdjointReport selfadjoint_independence(const SystemSpec& sys, const std::vector<double>& taus,
                                           const Tolerances& tol = {});

struct TruncationBound {
  long gamma_star = 0;
  double predicted_lower = 0.0;
  double measured_c1 = 0.0;
  double c1_infinite = 0.0;
  double c2_infinite = 0.0;
  double a_norm = 0.0;
  bool ok = false;
  std::string baseline;  // "closed form" or "certified truncation"
};

/// Smallest gamma with c1 - c2 ||A||^{2(gamma+1)} > 0 and the measured
/// lambda_min(Q_gamma). NotStronglyStableError when ||A|| >= 1.
TruncationBound stable_truncation_bound(const SystemSpec& sys, const Tolerances& tol = {});

/// g(t, z) = (e^{tz} - 1) / z with g(t, 0) = t.
Complex g_function(double t, Complex z);

/// int_0^tau e^{tA} dt as the matrix series g(tau, A).
Matrix integral_operator_series(const Matrix& a, double tau);
/// The same integral by composite Gauss-Legendre quadrature.
Matrix integral_operator_quadrature(const Matrix& a, double tau, int panels = 8,
                                    int nodes_per_panel = 8);

struct BesselOperatorReport {
  Matrix t_series;
  Matrix t_quadrature;
  double series_vs_quadrature_error = 0.0;
  bool invertible = false;
  std::vector<Complex> spectral_certificate;  // g(tau, mu_i)
  double min_abs_g = 0.0;
  double certified_tau = 0.0;  // bisection result on [0, tau_max]
};

BesselOperatorReport bessel_admissibility_operator(const Matrix& a, double tau, double tol = 1e-10,
                                                   std::optional<double> tau_max = std::nullopt);

}  // namespace obsdict
