#include "obsdict/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "obsdict/errors.hpp"

namespace obsdict {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

TailCertificate require_certified(const SystemSpec& sys) {
  TailCertificate cert = certify_tail(sys);
  if (!cert.ok) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "tail bound " << cert.tail_bound << " exceeds tail_tol; suggested truncation "
        << cert.suggested_truncation;
    throw TailNotCertifiableError(msg.str());
  }
  return cert;
}

ObservabilityMatrix discrete_rows(const SystemSpec& sys, long last_step) {
  const Eigen::Index g = sys.b().rows();
  const Eigen::Index n = sys.dim();
  ObservabilityMatrix psi;
  psi.matrix.resize(g * (last_step + 1), n);
  Matrix block = sys.b();
  for (long k = 0; k <= last_step; ++k) {
    psi.matrix.middleRows(g * k, g) = block;
    for (Eigen::Index s = 0; s < g; ++s) {
      psi.index_map.push_back({false, k, 0.0, static_cast<std::size_t>(s)});
      psi.row_weights.push_back(1.0);
    }
    if (k < last_step) block = block * sys.a();
  }
  return psi;
}

}  // namespace

ObservabilityMatrix observability_matrix(const SystemSpec& sys, const QuadratureGrid& grid) {
  const Eigen::Index g = sys.b().rows();
  ObservabilityMatrix psi;
  psi.matrix.resize(g * static_cast<Eigen::Index>(grid.size()), sys.dim());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double root_w = std::sqrt(grid.weights()[j]);
    psi.matrix.middleRows(g * static_cast<Eigen::Index>(j), g) =
        root_w * (sys.b() * matrix_exponential(sys.a(), grid.nodes()[j]));
    for (Eigen::Index s = 0; s < g; ++s) {
      psi.index_map.push_back({true, 0, grid.nodes()[j], static_cast<std::size_t>(s)});
      psi.row_weights.push_back(root_w);
    }
  }
  return psi;
}

ObservabilityMatrix observability_matrix(const SystemSpec& sys) {
  return std::visit(
      [&](const auto& t) -> ObservabilityMatrix {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DiscreteFinite>) {
          return discrete_rows(sys, t.gamma);
        } else if constexpr (std::is_same_v<T, DiscreteInfinite>) {
          TailCertificate cert = require_certified(sys);
          ObservabilityMatrix psi = discrete_rows(sys, t.truncation);
          psi.tail = cert;
          return psi;
        } else if constexpr (std::is_same_v<T, ContinuousFinite>) {
          return observability_matrix(
              sys, QuadratureGrid::gauss_legendre(t.tau, t.panels, t.nodes_per_panel));
        } else {
          TailCertificate cert = require_certified(sys);
          ObservabilityMatrix psi = observability_matrix(
              sys, QuadratureGrid::gauss_legendre(t.horizon, t.panels, t.nodes_per_panel));
          psi.tail = cert;
          return psi;
        }
      },
      sys.time());
}

Matrix grammian(const ObservabilityMatrix& psi) {
  Matrix q = psi.matrix.adjoint() * psi.matrix;
  return (q + q.adjoint()) / 2.0;
}

Matrix grammian(const SystemSpec& sys) { return grammian(observability_matrix(sys)); }

Matrix grammian_closed_form_diagonal(const DiagonalizableSystem& sys, const SamplingFamily& family,
                                     Horizon kind) {
  const Eigen::Index n = sys.dim();
  if (family.dim() != n) throw DimensionMismatchError("sampling family dimension mismatch");
  const std::vector<Complex>& mu = sys.spectrum().mu();
  for (const Complex& z : mu) {
    if (kind == Horizon::kDiscreteInfinite && !(std::abs(z) < 1))
      throw ConvergenceError("geometric Grammian sum diverges: |mu| >= 1");
    if (kind == Horizon::kContinuousInfinite && !(z.real() < 0))
      throw ConvergenceError("exponential Grammian integral diverges: Re mu >= 0");
  }
  const Matrix v = sys.basis_or_identity();
  const Matrix bv = ObservationOperator::from_family(family).matrix() * v;
  Matrix hat = bv.adjoint() * bv;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex mi = std::conj(mu[static_cast<std::size_t>(i)]);
      const Complex mj = mu[static_cast<std::size_t>(j)];
      hat(i, j) *= kind == Horizon::kDiscreteInfinite ? 1.0 / (1.0 - mi * mj) : -1.0 / (mi + mj);
    }
  }
  Matrix q;
  if (sys.basis()) {
    const Matrix v_inv = v.partialPivLu().inverse();
    q = v_inv.adjoint() * hat * v_inv;
  } else {
    q = hat;
  }
  return (q + q.adjoint()) / 2.0;
}

FrameReport frame_report_from_grammian(const Matrix& q, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(q, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  FrameReport report;
  report.c2 = std::max(ev.maxCoeff(), 0.0);
  report.c1 = std::clamp(ev.minCoeff(), 0.0, report.c2);
  const double factor = tol.rank_rel_tol ? *tol.rank_rel_tol : static_cast<double>(q.rows()) * kEps;
  report.rank = report.c2 > 0 ? (ev.array() > factor * report.c2).count() : 0;
  if (report.c1 > 0) report.condition_number = report.c2 / report.c1;
  report.verdicts.bessel_admissible = std::isfinite(report.c2);
  report.verdicts.complete_aob = report.rank == q.rows();
  report.verdicts.frame_eob = report.c2 > 0 && report.c1 > tol.eob_rel_tol * report.c2;
  return report;
}

FrameReport frame_report(const SystemSpec& sys, const Tolerances& tol) {
  const ObservabilityMatrix psi = observability_matrix(sys);
  FrameReport report = frame_report_from_grammian(grammian(psi), tol);
  report.tail_certificate = psi.tail;
  if (is_continuous(sys.time())) {
    try {
      report.verdicts.bessel_admissible = admissibility_bound_check(sys).satisfied;
    } catch (const NotApplicableError&) {
      // No closed-form admissibility constant; c2 itself is finite.
    }
  }
  return report;
}

double admissibility_bound_finite(double a_norm, double tau, double b_norm) {
  if (a_norm == 0.0) return tau * b_norm * b_norm;
  return std::expm1(2.0 * a_norm * tau) / (2.0 * a_norm) * b_norm * b_norm;
}

AdmissibilityCheck admissibility_bound_check(const SystemSpec& sys) {
  AdmissibilityCheck check;
  const double b_norm = spectral_norm(sys.b());
  if (const auto* cf = std::get_if<ContinuousFinite>(&sys.time())) {
    check.bound = admissibility_bound_finite(spectral_norm(sys.a()), cf->tau, b_norm);
    check.form = "finite";
  } else if (std::holds_alternative<ContinuousInfinite>(sys.time())) {
    const double omega = log_norm(sys.a());
    if (!(omega < 0))
      throw NotApplicableError("infinite-time admissibility bound needs a negative logarithmic norm");
    check.bound = -b_norm * b_norm / (2.0 * omega);
    check.form = "infinite";
  } else {
    throw NotApplicableError("admissibility bounds apply to continuous time domains");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(grammian(sys), Eigen::EigenvaluesOnly);
  check.c2 = std::max(solver.eigenvalues().maxCoeff(), 0.0);
  check.satisfied = check.c2 <= check.bound * (1.0 + 1e-8);
  return check;
}

Reconstruction reconstruct(const SystemSpec& sys, const Vector& y, const Tolerances& tol) {
  const ObservabilityMatrix psi = observability_matrix(sys);
  if (y.size() != psi.matrix.rows())
    throw DimensionMismatchError("observation record length does not match the index map");
  const Matrix q = grammian(psi);
  const FrameReport report = frame_report_from_grammian(q, tol);
  if (!report.verdicts.frame_eob) {
    std::ostringstream msg;
    msg << "not exactly observable (c1 = " << report.c1 << ", c2 = " << report.c2
        << "); reconstruction refused";
    throw NotObservableError(msg.str());
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(q);
  Reconstruction out;
  out.x0 = qr.solve(psi.matrix.adjoint() * y);
  out.residual = (psi.matrix * out.x0 - y).norm();
  return out;
}

SystemSpec dual_system(const SystemSpec& sys) {
  return SystemSpec(Operator(sys.a().adjoint()), sys.sampling(), sys.time(), sys.b().adjoint());
}

double sigma_min_of(const Matrix& m, Eigen::Index dim) {
  const std::vector<double> sv = singular_values(m);
  if (static_cast<Eigen::Index>(sv.size()) < dim) return 0.0;
  return sv[static_cast<std::size_t>(dim - 1)];
}

DualityReport duality_check(const SystemSpec& sys, const Tolerances& tol) {
  if (is_infinite(sys.time()))
    throw NotApplicableError("duality is checked at finite horizons only");
  const ObservabilityMatrix psi = observability_matrix(sys);
  const SystemSpec dual = dual_system(sys);
  const Matrix theta = controllability_matrix(dual);
  const Matrix psi_h = psi.matrix.adjoint();

  const Eigen::Index m = sys.b().rows();
  const Eigen::Index blocks = theta.cols() / m;
  Matrix reflected(theta.rows(), theta.cols());
  for (Eigen::Index j = 0; j < blocks; ++j)
    reflected.middleCols(m * j, m) = theta.middleCols(m * (blocks - 1 - j), m);

  DualityReport report;
  report.adjoint_identity_error = spectral_norm(psi_h - reflected);
  report.unreflected_error = spectral_norm(psi_h - theta);
  report.reflection_needed =
      report.unreflected_error > 1e-10 * std::max(1.0, spectral_norm(psi.matrix));

  const FrameReport frame = frame_report_from_grammian(grammian(psi), tol);
  // Q thresholds eigenvalues (sigma^2); Theta is cut on the matching sigma scale.
  const double q_tol = tol.rank_rel_tol.value_or(static_cast<double>(sys.dim()) * kEps);
  const ControllabilityReport ctrl =
      controllability_tests(dual, std::sqrt(tol.eob_rel_tol), std::sqrt(q_tol));
  report.sigma_min_psi = sigma_min_of(psi.matrix, sys.dim());
  report.sigma_min_dual = ctrl.sigma_min;
  report.eob = frame.verdicts.frame_eob;
  report.aob = frame.verdicts.complete_aob;
  report.dual_eco = ctrl.eco;
  report.dual_aco = ctrl.aco;
  report.eob_iff_dual_eco = report.eob == report.dual_eco;
  report.aob_iff_dual_aco = report.aob == report.dual_aco;
  return report;
}

}  // namespace obsdict
