#include "obsdict/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "obsdict/errors.hpp"
#include "obsdict/format.hpp"

namespace obsdict {

namespace {

double lambda_min(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

// ---- discretization sweep ----------------------------------------------------

SweepResult discretization_sweep(const SystemSpec& sys, std::vector<double> deltas,
                                 const Tolerances& tol) {
  const auto* cf = std::get_if<ContinuousFinite>(&sys.time());
  if (!cf) throw NotApplicableError("discretization sweeps need a continuous finite time domain");
  if (deltas.empty()) throw InvalidArgumentError("at least one grid spacing is required");
  for (double d : deltas)
    if (!(d > 0) || !std::isfinite(d)) throw InvalidArgumentError("grid spacings must be positive");
  std::sort(deltas.begin(), deltas.end());

  SweepResult result;
  result.reference = frame_report(sys, tol);
  if (!result.reference.verdicts.frame_eob)
    throw NotObservableError("continuous baseline is not a frame; sweep is meaningless");

  for (double delta : deltas) {
    const QuadratureGrid grid = QuadratureGrid::uniform(cf->tau, delta);
    SweepRow row;
    row.delta = delta;
    row.report = frame_report_from_grammian(grammian(observability_matrix(sys, grid)), tol);
    row.c1_gap = std::abs(row.report.c1 - result.reference.c1);
    row.c2_gap = std::abs(row.report.c2 - result.reference.c2);
    result.rows.push_back(std::move(row));
  }
  result.all_frames = true;
  for (const SweepRow& row : result.rows) {
    if (!row.report.verdicts.frame_eob) {
      result.all_frames = false;
      break;
    }
    result.threshold_delta = row.delta;
  }
  return result;
}

std::string sweep_tsv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "delta\tc1\tc2\tc1_ref_gap\tc2_ref_gap\tverdict\n";
  for (const SweepRow& row : sweep.rows) {
    out << format_double(row.delta) << '\t' << format_double(row.report.c1) << '\t'
        << format_double(row.report.c2) << '\t' << format_double(row.c1_gap) << '\t'
        << format_double(row.c2_gap) << '\t'
        << (row.report.verdicts.frame_eob ? "frame" : "not_frame") << '\n';
  }
  return out.str();
}

// ---- Kalman rank independence -------------------------------------------------

Matrix kalman_matrix(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = b.rows();
  Matrix k(p * n, n);
  Matrix block = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    k.middleRows(p * i, p) = block;
    block = block * a;
  }
  return k;
}

KalmanReport kalman_independence(const SystemSpec& sys, const std::vector<double>& taus,
                                 long truncation, const Tolerances& tol, int panels,
                                 int nodes_per_panel) {
  KalmanReport report;
  // rank Q = rank Psi; ranks come from singular values of Psi, cut at the square
  // root of the Q eigenvalue threshold, which avoids squaring the conditioning.
  const double q_tol = tol.rank_rel_tol.value_or(static_cast<double>(sys.dim()) *
                                                 std::numeric_limits<double>::epsilon());
  const double sigma_tol = std::sqrt(q_tol);
  for (double tau : taus) {
    const SystemSpec at_tau = sys.with_time(ContinuousFinite{tau, panels, nodes_per_panel});
    report.ranks.push_back(numerical_rank(observability_matrix(at_tau).matrix, sigma_tol));
  }
  report.truncation = std::max<long>(truncation, static_cast<long>(sys.dim()) - 1);
  const SystemSpec discrete = sys.with_time(DiscreteFinite{report.truncation});
  report.discrete_rank = numerical_rank(observability_matrix(discrete).matrix, sigma_tol);
  report.kalman_rank = numerical_rank(kalman_matrix(sys.a(), sys.b()), sigma_tol);
  report.all_equal = report.discrete_rank == report.kalman_rank &&
                     std::all_of(report.ranks.begin(), report.ranks.end(),
                                 [&](Eigen::Index r) { return r == report.kalman_rank; });
  return report;
}

// ---- self-adjoint time independence ---------------------------------------------

SelfAdjointReport selfadjoint_independence(const SystemSpec& sys, const std::vector<double>& taus,
                                           const Tolerances& tol) {
  const double scale = spectral_norm(sys.a());
  if (spectral_norm(sys.a() - sys.a().adjoint()) > 1e-12 * scale)
    throw NotSelfAdjointError("dynamic operator is not Hermitian");
  int panels = 8, nodes = 8;
  if (const auto* cf = std::get_if<ContinuousFinite>(&sys.time())) {
    panels = cf->panels;
    nodes = cf->nodes_per_panel;
  }
  SelfAdjointReport report;
  for (double tau : taus) {
    const FrameReport fr = frame_report(sys.with_time(ContinuousFinite{tau, panels, nodes}), tol);
    report.taus.push_back(tau);
    report.frame_verdicts.push_back(fr.verdicts.frame_eob);
    report.c1_curve.push_back(fr.c1);
  }
  report.all_agree = std::adjacent_find(report.frame_verdicts.begin(), report.frame_verdicts.end(),
                                        std::not_equal_to<>()) == report.frame_verdicts.end();
  return report;
}

// ---- stable truncation ----------------------------------------------------------

TruncationBound stable_truncation_bound(const SystemSpec& sys, const Tolerances& tol) {
  if (is_continuous(sys.time()))
    throw NotApplicableError("truncation bound is stated for discrete dynamics");
  TruncationBound out;
  out.a_norm = spectral_norm(sys.a());
  if (!(out.a_norm < 1))
    throw NotStronglyStableError("||A|| >= 1: the truncation argument needs a contraction");

  Matrix q_inf;
  double tail = 0.0;
  if (const DiagonalizableSystem* d = sys.diagonal()) {
    q_inf = grammian_closed_form_diagonal(*d, sys.sampling(), Horizon::kDiscreteInfinite);
    out.baseline = "closed form";
  } else {
    SystemSpec probe = sys.with_time(DiscreteInfinite{1, 1e-12});
    const long k = std::max<long>(1, static_cast<long>(certify_tail(probe).suggested_truncation));
    const SystemSpec certified = sys.with_time(DiscreteInfinite{k, 1e-12});
    tail = certify_tail(certified).tail_bound;
    q_inf = grammian(certified);
    out.baseline = "certified truncation";
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q_inf, Eigen::EigenvaluesOnly);
  out.c1_infinite = std::max(0.0, solver.eigenvalues().minCoeff());
  out.c2_infinite = solver.eigenvalues().maxCoeff() + tail;
  if (!(out.c1_infinite > tol.eob_rel_tol * out.c2_infinite))
    throw NotObservableError("not exactly observable at infinite time");

  auto predicted = [&](long gamma) {
    return out.c1_infinite - out.c2_infinite * std::pow(out.a_norm, 2.0 * (gamma + 1));
  };
  long gamma = 0;
  if (out.a_norm > 0) {
    const double estimate =
        std::log(out.c1_infinite / out.c2_infinite) / (2.0 * std::log(out.a_norm)) - 1.0;
    gamma = std::max(0L, static_cast<long>(std::ceil(estimate)));
    while (gamma > 0 && predicted(gamma - 1) > 0) --gamma;
    while (!(predicted(gamma) > 0)) ++gamma;
  }
  out.gamma_star = gamma;
  out.predicted_lower = predicted(gamma);
  out.measured_c1 = lambda_min(grammian(sys.with_time(DiscreteFinite{gamma})));
  out.ok = out.measured_c1 >= out.predicted_lower * (1.0 - 1e-9);
  return out;
}

// ---- integral operator g(tau, A) ---------------------------------------------------

Complex g_function(double t, Complex z) {
  const Complex w = t * z;
  if (std::abs(w) < 0.5) {
    // t * sum_{k>=0} w^k / (k+1)!
    Complex term = 1.0, sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= w / static_cast<double>(k + 1);
      sum += term;
    }
    return t * sum;
  }
  return (std::exp(w) - 1.0) / z;
}

Matrix integral_operator_series(const Matrix& a, double tau) {
  const Eigen::Index n = a.rows();
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff() * std::abs(tau);
  int squarings = norm1 > 0.5 ? static_cast<int>(std::ceil(std::log2(norm1 / 0.5))) : 0;
  const double h = tau / std::ldexp(1.0, squarings);

  // T_h = sum_{k>=1} h^k A^{k-1} / k!, E_h = e^{hA}.
  Matrix t_h = Matrix::Zero(n, n);
  Matrix e_h = Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);  // (hA)^{k-1}
  double factorial = 1.0;
  for (int k = 1; k <= 20; ++k) {
    factorial *= k;
    t_h += (h / factorial) * power;
    power = power * (h * a);
    e_h += power / factorial;
  }
  // int_0^{2s} = int_0^s + e^{sA} int_0^s.
  for (int s = 0; s < squarings; ++s) {
    t_h = t_h + e_h * t_h;
    e_h = e_h * e_h;
  }
  return t_h;
}

Matrix integral_operator_quadrature(const Matrix& a, double tau, int panels, int nodes_per_panel) {
  const QuadratureGrid grid = QuadratureGrid::gauss_legendre(tau, panels, nodes_per_panel);
  Matrix t = Matrix::Zero(a.rows(), a.cols());
  for (std::size_t j = 0; j < grid.size(); ++j)
    t += grid.weights()[j] * matrix_exponential(a, grid.nodes()[j]);
  return t;
}

BesselOperatorReport bessel_admissibility_operator(const Matrix& a, double tau, double tol,
                                                   std::optional<double> tau_max) {
  if (!(tau > 0) || !std::isfinite(tau)) throw InvalidArgumentError("tau must be positive");
  BesselOperatorReport report;
  report.t_series = integral_operator_series(a, tau);
  report.t_quadrature = integral_operator_quadrature(a, tau);
  report.series_vs_quadrature_error = spectral_norm(report.t_series - report.t_quadrature);

  const std::vector<Complex> mu = eigenvalues(a);
  auto min_abs_g = [&](double t) {
    double m = std::numeric_limits<double>::infinity();
    for (const Complex& z : mu) m = std::min(m, std::abs(g_function(t, z)));
    return m;
  };
  for (const Complex& z : mu) report.spectral_certificate.push_back(g_function(tau, z));
  report.min_abs_g = min_abs_g(tau);
  report.invertible = report.min_abs_g > tol;

  const double upper = tau_max.value_or(tau);
  if (min_abs_g(upper) > tol) {
    report.certified_tau = upper;
  } else {
    double lo = 0.0, hi = upper;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      (min_abs_g(mid) > tol ? lo : hi) = mid;
    }
    report.certified_tau = lo;
  }
  return report;
}

}  // namespace obsdict
