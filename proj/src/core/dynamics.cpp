#include "obsdict/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "obsdict/errors.hpp"

namespace obsdict {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

const Matrix& require_control(const SystemSpec& sys) {
  if (!sys.control()) throw NotApplicableError("system has no control operator");
  return *sys.control();
}

void check_signal_dims(const std::vector<Vector>& values, Eigen::Index m) {
  for (const Vector& v : values)
    if (v.size() != m) throw DimensionMismatchError("control value dimension mismatch");
}

// Condition number of an eigenvector basis when A is certifiably
// diagonalizable, otherwise nullopt.
std::optional<double> eigenbasis_condition(const SystemSpec& sys) {
  if (const DiagonalizableSystem* d = sys.diagonal()) return d->basis_condition();
  try {
    return spectral_decomposition(sys.a()).basis_condition();
  } catch (const NotDiagonalizableError&) {
    return std::nullopt;
  }
}

std::string format_kappa(double kappa) {
  std::ostringstream out;
  out.precision(6);
  out << kappa;
  return out.str();
}

}  // namespace

// ---- quadrature ------------------------------------------------------------

QuadratureGrid::QuadratureGrid(std::vector<double> nodes, std::vector<double> weights,
                               std::string rule)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), rule_(std::move(rule)) {
  if (nodes_.empty() || nodes_.size() != weights_.size())
    throw QuadratureError("grid needs matching, non-empty nodes and weights");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!(weights_[i] > 0) || !std::isfinite(weights_[i]) || !std::isfinite(nodes_[i]))
      throw QuadratureError("grid weights must be positive and finite");
    if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
      throw QuadratureError("grid nodes must be strictly increasing");
  }
  if (nodes_.front() < 0) throw QuadratureError("grid nodes must be nonnegative");
}

double QuadratureGrid::weight_sum() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

void gauss_legendre_reference(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw QuadratureError("Gauss-Legendre order must be positive");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

QuadratureGrid QuadratureGrid::gauss_legendre(double length, int panels, int nodes_per_panel) {
  if (!(length > 0) || panels < 1 || nodes_per_panel < 1)
    throw QuadratureError("invalid Gauss-Legendre grid parameters");
  std::vector<double> ref_x, ref_w;
  gauss_legendre_reference(nodes_per_panel, ref_x, ref_w);
  const double h = length / panels;
  std::vector<double> nodes, weights;
  nodes.reserve(static_cast<std::size_t>(panels * nodes_per_panel));
  weights.reserve(nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const double left = length * p / panels;
    for (std::size_t i = 0; i < ref_x.size(); ++i) {
      nodes.push_back(left + 0.5 * h * (ref_x[i] + 1.0));
      weights.push_back(0.5 * h * ref_w[i]);
    }
  }
  std::ostringstream rule;
  rule << "gauss-legendre " << panels << "x" << nodes_per_panel;
  return QuadratureGrid(std::move(nodes), std::move(weights), rule.str());
}

QuadratureGrid QuadratureGrid::uniform(double length, double delta) {
  if (!(length > 0) || !(delta > 0)) throw QuadratureError("invalid uniform grid parameters");
  std::vector<double> nodes, weights;
  for (long j = 0;; ++j) {
    const double t = static_cast<double>(j) * delta;
    if (t >= length * (1.0 - 1e-12)) break;
    nodes.push_back(t);
    weights.push_back(delta);
  }
  std::ostringstream rule;
  rule.precision(17);
  rule << "uniform delta=" << delta;
  return QuadratureGrid(std::move(nodes), std::move(weights), rule.str());
}

QuadratureGrid QuadratureGrid::partition(const std::vector<double>& points) {
  if (points.size() < 2 || points.front() != 0.0)
    throw QuadratureError("partition must start at 0 and have at least one cell");
  std::vector<double> nodes, weights;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    nodes.push_back(points[i]);
    weights.push_back(points[i + 1] - points[i]);
  }
  return QuadratureGrid(std::move(nodes), std::move(weights), "partition left-endpoint");
}

// ---- trajectories ------------------------------------------------------------

Vector evolve_discrete(const SystemSpec& sys, const Vector& x0, const DiscreteSignal& u,
                       long k) {
  if (k < 0) throw InvalidArgumentError("step count must be nonnegative");
  if (x0.size() != sys.dim()) throw DimensionMismatchError("initial state dimension mismatch");
  Vector x = operator_power(sys.a(), static_cast<unsigned long>(k)) * x0;
  if (u.values.empty() || k == 0) return x;
  const Matrix& c = require_control(sys);
  check_signal_dims(u.values, c.cols());
  if (static_cast<long>(u.values.size()) < k)
    throw DimensionMismatchError("discrete control signal shorter than the horizon");
  // sum_{j<k} A^{k-1-j} C u(j), accumulated as a Horner recursion.
  Vector forced = Vector::Zero(sys.dim());
  for (long j = 0; j < k; ++j) forced = sys.a() * forced + c * u.values[static_cast<std::size_t>(j)];
  return x + forced;
}

Vector controllability_map(const SystemSpec& sys, const DiscreteSignal& u, long k) {
  if (k < 0) throw InvalidArgumentError("horizon must be nonnegative");
  const Matrix& c = require_control(sys);
  if (u.values.empty()) return Vector::Zero(sys.dim());
  check_signal_dims(u.values, c.cols());
  if (static_cast<long>(u.values.size()) < k + 1)
    throw DimensionMismatchError("discrete control signal shorter than the horizon");
  Vector acc = Vector::Zero(sys.dim());
  Matrix power = Matrix::Identity(sys.dim(), sys.dim());
  for (long j = k; j >= 0; --j) {
    acc += power * (c * u.values[static_cast<std::size_t>(j)]);
    power = power * sys.a();
  }
  return acc;
}

Vector controllability_map(const SystemSpec& sys, const ContinuousSignal& u) {
  const Matrix& c = require_control(sys);
  if (u.values.empty()) return Vector::Zero(sys.dim());
  check_signal_dims(u.values, c.cols());
  if (u.values.size() != u.grid.size())
    throw DimensionMismatchError("continuous control must have one value per grid node");
  const double t = u.grid.weight_sum();
  Vector acc = Vector::Zero(sys.dim());
  for (std::size_t j = 0; j < u.grid.size(); ++j) {
    const double s = u.grid.nodes()[j];
    if (s > t * (1 + 1e-12)) throw QuadratureError("grid node outside [0, t]");
    acc += u.grid.weights()[j] * (matrix_exponential(sys.a(), t - s) * (c * u.values[j]));
  }
  return acc;
}

Vector evolve_continuous(const SystemSpec& sys, const Vector& x0, const ContinuousSignal& u,
                         double t) {
  if (!(t >= 0) || !std::isfinite(t)) throw InvalidArgumentError("time must be finite and >= 0");
  if (x0.size() != sys.dim()) throw DimensionMismatchError("initial state dimension mismatch");
  Vector x = matrix_exponential(sys.a(), t) * x0;
  if (u.values.empty()) return x;
  const double span = u.grid.weight_sum();
  if (std::abs(span - t) > 1e-12 * std::max(1.0, t) || u.grid.nodes().back() > t)
    throw QuadratureError("control grid does not cover [0, t]");
  return x + controllability_map(sys, u);
}

// ---- controllability --------------------------------------------------------

Matrix controllability_matrix(const SystemSpec& sys) {
  const Matrix& c = require_control(sys);
  const Eigen::Index n = sys.dim();
  const Eigen::Index m = c.cols();
  if (const auto* d = std::get_if<DiscreteFinite>(&sys.time())) {
    const long gamma = d->gamma;
    std::vector<Matrix> powers;  // A^i C
    powers.reserve(static_cast<std::size_t>(gamma + 1));
    powers.push_back(c);
    for (long i = 1; i <= gamma; ++i) powers.push_back(sys.a() * powers.back());
    Matrix theta(n, m * (gamma + 1));
    for (long j = 0; j <= gamma; ++j)
      theta.middleCols(m * j, m) = powers[static_cast<std::size_t>(gamma - j)];
    return theta;
  }
  if (const auto* ct = std::get_if<ContinuousFinite>(&sys.time())) {
    const QuadratureGrid grid =
        QuadratureGrid::gauss_legendre(ct->tau, ct->panels, ct->nodes_per_panel);
    Matrix theta(n, m * static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
      theta.middleCols(m * static_cast<Eigen::Index>(j), m) =
          std::sqrt(grid.weights()[j]) * matrix_exponential(sys.a(), ct->tau - grid.nodes()[j]) * c;
    }
    return theta;
  }
  throw NotApplicableError("controllability is only defined here for finite horizons");
}

ControllabilityReport controllability_tests(const SystemSpec& sys, double eco_rel_tol,
                                            std::optional<double> rank_rel_tol) {
  const Matrix theta = controllability_matrix(sys);
  const std::vector<double> sv = singular_values(theta);
  ControllabilityReport report;
  report.sigma_max = sv.front();
  // Surjectivity needs dim nonzero singular values.
  report.sigma_min = static_cast<Eigen::Index>(sv.size()) >= sys.dim()
                         ? sv[static_cast<std::size_t>(sys.dim() - 1)]
                         : 0.0;
  report.reach_rank = numerical_rank(theta, rank_rel_tol);
  report.aco = report.reach_rank == sys.dim();
  report.eco = report.sigma_max > 0 && report.sigma_min > eco_rel_tol * report.sigma_max;
  return report;
}

Matrix reachable_space(const SystemSpec& sys, std::optional<double> rank_rel_tol) {
  const Matrix theta = controllability_matrix(sys);
  const Eigen::Index r = numerical_rank(theta, rank_rel_tol);
  Eigen::JacobiSVD<Matrix> svd(theta, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(r);
}

double max_principal_angle(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() != q2.cols()) return std::numbers::pi / 2;
  if (q1.cols() == 0) return 0.0;
  // Sine form: acos of cosines near 1 cannot resolve angles below ~1e-8.
  const Matrix residual = q2 - q1 * (q1.adjoint() * q2);
  const double largest_sine = std::clamp(singular_values(residual).front(), 0.0, 1.0);
  return std::asin(largest_sine);
}

// ---- tail certification -------------------------------------------------------

TailCertificate TailCertificate::closed_form_path() {
  TailCertificate cert;
  cert.ok = true;
  cert.tail_bound = 0.0;
  cert.method = "closed form (no truncation)";
  cert.closed_form = true;
  return cert;
}

TailCertificate certify_tail(const SystemSpec& sys) {
  const double b_norm_sq = std::pow(spectral_norm(sys.b()), 2);
  const StabilityInfo stab = stability_classification(sys.a());
  const std::optional<double> kappa = eigenbasis_condition(sys);
  TailCertificate cert;

  if (const auto* di = std::get_if<DiscreteInfinite>(&sys.time())) {
    const double rho = stab.spectral_radius;
    if (!(rho < 1))
      throw TailNotCertifiableError("spectral radius >= 1: discrete tail is not summable");
    if (kappa) {
      const double scale = b_norm_sq * (*kappa) * (*kappa) / (1.0 - rho * rho);
      auto bound = [&](long k) { return rho == 0 ? 0.0 : scale * std::pow(rho, 2.0 * (k + 1)); };
      cert.tail_bound = bound(di->truncation);
      long suggested = 0;
      if (rho > 0 && scale > di->tail_tol) {
        suggested = static_cast<long>(
            std::ceil(std::log(di->tail_tol / scale) / (2.0 * std::log(rho)) - 1.0));
        suggested = std::max(0L, suggested);
        while (bound(suggested) > di->tail_tol) ++suggested;
      }
      cert.suggested_truncation = static_cast<double>(suggested);
      cert.method = "geometric (diagonalizable, kappa=" + format_kappa(*kappa) + ")";
    } else {
      // ||A^{K+1+i}|| <= ||A^{K+1}|| * M * q^{floor(i/m)}, q = ||A^m|| < 1,
      // M = max_{j<m} ||A^j||.
      long m = 1;
      Matrix am = sys.a();
      double q = spectral_norm(am);
      while (q >= 1) {
        if (m > (1L << 20)) throw TailNotCertifiableError("no contracting power of A found");
        am = am * am;
        m *= 2;
        q = spectral_norm(am);
      }
      double big_m = 1.0;
      Matrix p = Matrix::Identity(sys.dim(), sys.dim());
      for (long j = 1; j < m; ++j) {
        p = p * sys.a();
        big_m = std::max(big_m, spectral_norm(p));
      }
      const double scale = b_norm_sq * big_m * big_m * static_cast<double>(m) / (1.0 - q * q);
      auto bound = [&](long k) {
        return scale * std::pow(spectral_norm(operator_power(sys.a(), static_cast<unsigned long>(k + 1))), 2);
      };
      cert.tail_bound = bound(di->truncation);
      long suggested = 1;
      while (bound(suggested) > di->tail_tol && suggested < (1L << 24)) suggested *= 2;
      cert.suggested_truncation = static_cast<double>(suggested);
      cert.method = "power-norm (m=" + std::to_string(m) + ")";
    }
    cert.ok = cert.tail_bound <= di->tail_tol;
    return cert;
  }

  if (const auto* ci = std::get_if<ContinuousInfinite>(&sys.time())) {
    const double omega = stab.omega;
    if (!(omega < 0))
      throw TailNotCertifiableError("max Re sigma(A) >= 0: continuous tail is not integrable");
    if (kappa) {
      const double scale = b_norm_sq * (*kappa) * (*kappa) / (-2.0 * omega);
      auto bound = [&](double t) { return scale * std::exp(2.0 * omega * t); };
      cert.tail_bound = bound(ci->horizon);
      double suggested = 0.0;
      if (scale > ci->tail_tol) suggested = std::log(ci->tail_tol / scale) / (2.0 * omega);
      while (bound(suggested) > ci->tail_tol) suggested = suggested * (1.0 + 1e-12) + 1e-12;
      cert.suggested_truncation = suggested;
      cert.method = "exponential (diagonalizable, kappa=" + format_kappa(*kappa) + ")";
    } else {
      double h = 1.0;
      double q = spectral_norm(matrix_exponential(sys.a(), h));
      while (q >= 1) {
        if (h > 1e12) throw TailNotCertifiableError("no contracting semigroup step found");
        h *= 2;
        q = spectral_norm(matrix_exponential(sys.a(), h));
      }
      const double big_m = std::exp(h * std::max(0.0, log_norm(sys.a())));
      const double scale = b_norm_sq * h * big_m * big_m / (1.0 - q * q);
      auto bound = [&](double t) {
        return scale * std::pow(spectral_norm(matrix_exponential(sys.a(), t)), 2);
      };
      cert.tail_bound = bound(ci->horizon);
      double suggested = 1.0;
      while (bound(suggested) > ci->tail_tol && suggested < 1e12) suggested *= 2;
      cert.suggested_truncation = suggested;
      cert.method = "semigroup-step (h=" + format_kappa(h) + ")";
    }
    cert.ok = cert.tail_bound <= ci->tail_tol;
    return cert;
  }
  throw TailNotCertifiableError("tail certificates apply to infinite time domains only");
}

}  // namespace obsdict
