#include "obsdict/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obsdict/errors.hpp"

namespace obsdict {

namespace {

// 1 - |z|^2 without cancellation near the unit circle.
double one_minus_abs_sq(Complex z) {
  const double r = std::abs(z);
  return (1.0 - r) * (1.0 + r);
}

struct Split {
  std::size_t head_end = 0;  // [0, head_end) head, [head_end, n) tail
  bool usable = false;
};

Split split_for(std::size_t n, const Tolerances& tol) {
  Split s;
  if (n < 2) return s;
  const std::size_t w = trend_window_for(n, tol);
  s.head_end = n - w;
  s.usable = true;
  return s;
}

double min_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(begin),
                           v.begin() + static_cast<std::ptrdiff_t>(end));
}
double max_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return *std::max_element(v.begin() + static_cast<std::ptrdiff_t>(begin),
                           v.begin() + static_cast<std::ptrdiff_t>(end));
}

template <typename Factor>
CarlesonResult carleson_products(const std::vector<Complex>& lambdas, double delta_floor,
                                 Factor factor) {
  CarlesonResult result;
  const std::size_t n = lambdas.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (lambdas[i] == lambdas[j]) result.duplicate_pairs.emplace_back(i, j);

  double best_log = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double log_product = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double f = factor(lambdas[i], lambdas[k]);
      if (f == 0.0) {
        log_product = -std::numeric_limits<double>::infinity();
        break;
      }
      log_product += std::log(f);
    }
    if (log_product < best_log) {
      best_log = log_product;
      result.argmin_index = i;
    }
  }
  result.inf_product = n == 0 ? 1.0 : std::exp(best_log);
  result.pass = result.inf_product >= delta_floor;
  return result;
}

std::string format_indices(const std::vector<std::size_t>& idx) {
  std::ostringstream out;
  for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
  return out.str();
}

EigenSamplePair subset(const EigenSamplePair& pair, const std::vector<std::size_t>& keep) {
  std::vector<Complex> l, c;
  std::vector<double> nr;
  for (std::size_t i : keep) {
    l.push_back(pair.lambdas()[i]);
    c.push_back(pair.coeffs()[i]);
    nr.push_back(pair.norms()[i]);
  }
  return EigenSamplePair(std::move(l), std::move(c), std::move(nr));
}

// Shared skeleton of the disc and half-plane four-condition checks.
template <typename InDomain, typename Distance, typename CarlesonFn>
CriteriaReport four_conditions(const EigenSamplePair& pair, const Tolerances& tol, Regime regime,
                               InDomain in_domain, Distance boundary_distance,
                               CarlesonFn carleson, const char* names[4]) {
  CriteriaReport report;
  report.regime = regime;
  const std::size_t n = pair.size();

  // 1: domain membership.
  std::vector<std::size_t> inside, outside;
  for (std::size_t i = 0; i < n; ++i) (in_domain(pair.lambdas()[i]) ? inside : outside).push_back(i);
  Condition c1{names[0], outside.empty(), static_cast<double>(outside.size()), std::nullopt, ""};
  if (!outside.empty()) {
    c1.witness_index = outside.front();
    c1.note = "offending indices: " + format_indices(outside);
  }

  // 2: accumulation at the boundary, judged on the tail window.
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = boundary_distance(pair.lambdas()[i]);
  Condition c2{names[1], false, 0.0, std::nullopt, ""};
  const Split split = split_for(n, tol);
  if (split.usable) {
    const double tail_min = min_of(dist, split.head_end, n);
    const double head_min = min_of(dist, 0, split.head_end);
    c2.witness = tail_min;
    c2.pass = tail_min <= tol.trend_tol && tail_min <= tol.trend_ratio * head_min;
    std::ostringstream note;
    note.precision(6);
    note << "tail window " << n - split.head_end << ": min distance " << tail_min
         << " vs head " << head_min;
    c2.note = note.str();
  } else {
    c2.note = "sequence too short to show a trend";
  }

  // 3 and 4 on the in-domain indices so a single offender only fails 1.
  Condition c3{names[2], false, 0.0, std::nullopt, ""};
  Condition c4{names[3], false, 0.0, std::nullopt, ""};
  if (!inside.empty()) {
    const EigenSamplePair kept = subset(pair, inside);
    const CarlesonResult carl = carleson(kept.lambdas(), tol.delta_floor);
    c3.pass = carl.pass;
    c3.witness = carl.inf_product;
    c3.witness_index = inside[carl.argmin_index];
    for (const auto& [a, b] : carl.duplicate_pairs)
      report.duplicate_pairs.emplace_back(inside[a], inside[b]);
    if (!report.duplicate_pairs.empty()) {
      std::ostringstream note;
      note << "duplicate eigenvalues:";
      for (const auto& [a, b] : report.duplicate_pairs) note << " (" << a << "," << b << ")";
      c3.note = note.str();
    }
    const NormRatioResult ratios = norm_ratio_condition(kept, regime, tol);
    c4.pass = ratios.pass;
    c4.witness = ratios.c1_hat;
    std::ostringstream note;
    note.precision(6);
    note << "ratio range [" << ratios.c1_hat << ", " << ratios.c2_hat << "]";
    if (ratios.decaying) note << "; decaying toward 0";
    if (ratios.growing) note << "; growing without bound";
    c4.note = note.str();
  }
  report.conditions = {c1, c2, c3, c4};
  report.overall = std::all_of(report.conditions.begin(), report.conditions.end(),
                               [](const Condition& c) { return c.pass; });
  return report;
}

}  // namespace

EigenSamplePair::EigenSamplePair(std::vector<Complex> lambdas, std::vector<Complex> coeffs,
                                 std::vector<double> norms)
    : lambdas_(std::move(lambdas)), coeffs_(std::move(coeffs)), norms_(std::move(norms)) {
  if (lambdas_.empty()) throw DimensionMismatchError("eigen/sample pair must be non-empty");
  if (coeffs_.size() != lambdas_.size() || norms_.size() != lambdas_.size())
    throw DimensionMismatchError("lambda, coefficient and norm lists must have equal length");
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    if (!std::isfinite(std::abs(lambdas_[i])) || !std::isfinite(std::abs(coeffs_[i])) ||
        !std::isfinite(norms_[i]))
      throw NonFiniteError("eigen/sample pair contains NaN or Inf");
    if (!(norms_[i] > 0)) throw InvariantError("eigenvector norms must be positive");
  }
}

EigenSamplePair EigenSamplePair::from_system(const DiagonalizableSystem& sys, const Vector& b) {
  if (b.size() != sys.dim()) throw DimensionMismatchError("sampling vector dimension mismatch");
  const Matrix v = sys.basis_or_identity();
  std::vector<Complex> coeffs(static_cast<std::size_t>(sys.dim()));
  for (Eigen::Index n = 0; n < sys.dim(); ++n)
    coeffs[static_cast<std::size_t>(n)] = v.col(n).dot(b);  // <b, phi_n> = phi_n^H b
  return EigenSamplePair(sys.spectrum().lambda_view(), std::move(coeffs), sys.basis_norms());
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::kDiscDiscrete: return "disc-discrete";
    case Regime::kHalfplaneContinuous: return "halfplane-continuous";
    case Regime::kFiniteContinuous: return "finite-continuous";
  }
  return "unknown";
}

Regime parse_regime(const std::string& name) {
  if (name == "disc" || name == "disc-discrete") return Regime::kDiscDiscrete;
  if (name == "halfplane" || name == "halfplane-continuous") return Regime::kHalfplaneContinuous;
  if (name == "finite" || name == "finite-continuous") return Regime::kFiniteContinuous;
  throw InvalidArgumentError("unknown regime '" + name + "' (disc|halfplane|finite)");
}

double disc_factor(Complex z, Complex w) {
  return std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
}

double halfplane_factor(Complex z, Complex w) {
  return std::abs(z - w) / std::abs(z + std::conj(w));
}

CarlesonResult carleson_disc(const std::vector<Complex>& lambdas, double delta_floor) {
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (!(std::abs(lambdas[i]) < 1))
      throw DomainError("carleson_disc: |lambda_" + std::to_string(i) + "| >= 1");
  return carleson_products(lambdas, delta_floor, disc_factor);
}

CarlesonResult carleson_halfplane(const std::vector<Complex>& lambdas, double delta_floor) {
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (!(lambdas[i].real() > 0))
      throw DomainError("carleson_halfplane: Re lambda_" + std::to_string(i) + " <= 0");
  return carleson_products(lambdas, delta_floor, halfplane_factor);
}

std::size_t trend_window_for(std::size_t n, const Tolerances& tol) {
  std::size_t w = tol.trend_window > 0 ? static_cast<std::size_t>(tol.trend_window)
                                       : std::max<std::size_t>(5, n / 4);
  if (n >= 2) w = std::min(w, n - 1);
  return w;
}

NormRatioResult norm_ratio_condition(const EigenSamplePair& pair, Regime regime,
                                     const Tolerances& tol) {
  NormRatioResult result;
  const std::size_t n = pair.size();
  result.ratios.resize(n);
  double sup_re = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex l = pair.lambdas()[i];
    double weight = 1.0;
    switch (regime) {
      case Regime::kDiscDiscrete:
        if (!(std::abs(l) < 1))
          throw DomainError("condition 1 fails: |lambda_" + std::to_string(i) + "| >= 1");
        weight = std::sqrt(one_minus_abs_sq(l));
        break;
      case Regime::kHalfplaneContinuous:
        if (!(l.real() > 0))
          throw DomainError("condition 1 fails: Re lambda_" + std::to_string(i) + " <= 0");
        weight = std::sqrt(2.0 * l.real());
        break;
      case Regime::kFiniteContinuous:
        sup_re = std::max(sup_re, std::abs(l.real()));
        break;
    }
    result.ratios[i] = std::abs(pair.coeffs()[i]) / (pair.norms()[i] * weight);
  }
  if (regime == Regime::kFiniteContinuous) result.sup_abs_real = sup_re;
  result.c1_hat = *std::min_element(result.ratios.begin(), result.ratios.end());
  result.c2_hat = *std::max_element(result.ratios.begin(), result.ratios.end());
  result.bounds_ok = result.c1_hat > tol.c1_floor && result.c2_hat < tol.c2_cap;
  const Split split = split_for(n, tol);
  if (split.usable) {
    const double head_min = min_of(result.ratios, 0, split.head_end);
    const double head_max = max_of(result.ratios, 0, split.head_end);
    result.decaying = min_of(result.ratios, split.head_end, n) < tol.trend_ratio * head_min;
    result.growing = max_of(result.ratios, split.head_end, n) > head_max / tol.trend_ratio;
  }
  result.pass = result.bounds_ok && !result.decaying && !result.growing;
  return result;
}

double en_norm_squared(Complex lambda, double b_phi_norm, Regime regime, std::optional<double> tau) {
  const double b2 = b_phi_norm * b_phi_norm;
  switch (regime) {
    case Regime::kDiscDiscrete:
      if (!(std::abs(lambda) < 1)) throw ConvergenceError("sum |lambda|^{2k} diverges for |lambda| >= 1");
      return b2 / one_minus_abs_sq(lambda);
    case Regime::kHalfplaneContinuous:
      if (!(lambda.real() > 0)) throw ConvergenceError("integral of e^{-2 Re(lambda) t} diverges");
      return b2 / (2.0 * lambda.real());
    case Regime::kFiniteContinuous: {
      if (!tau || !(*tau > 0) || !std::isfinite(*tau))
        throw InvalidArgumentError("finite-continuous ||E_n|| needs a positive tau");
      const double r = lambda.real();
      if (r == 0.0) return *tau * b2;
      return std::expm1(-2.0 * r * *tau) / (-2.0 * r) * b2;
    }
  }
  return 0.0;
}

CriteriaReport one_point_frame_check(const EigenSamplePair& pair, const Tolerances& tol) {
  static const char* names[4] = {"1: |lambda_n| < 1", "2: |lambda_n| -> 1",
                                 "3: Carleson condition in the disc",
                                 "4: bounded |<b,phi_n>| / (||phi_n|| sqrt(1-|lambda_n|^2))"};
  return four_conditions(
      pair, tol, Regime::kDiscDiscrete, [](Complex l) { return std::abs(l) < 1; },
      [](Complex l) { return std::abs(1.0 - std::abs(l)); }, carleson_disc, names);
}

CriteriaReport continuous_infinite_check(const EigenSamplePair& pair, const Tolerances& tol) {
  static const char* names[4] = {"1: Re lambda_n > 0", "2: Re lambda_n -> 0",
                                 "3: half-plane Carleson condition",
                                 "4: bounded |<b,phi_n>| / (||phi_n|| sqrt(2 Re lambda_n))"};
  return four_conditions(
      pair, tol, Regime::kHalfplaneContinuous, [](Complex l) { return l.real() > 0; },
      [](Complex l) { return std::abs(l.real()); }, carleson_halfplane, names);
}

Complex mobius(Complex z) {
  // (1 - z)(1 + conj z) / |1 + z|^2, written so Re M = (1 - |z|^2) / |1 + z|^2
  // holds without cancellation.
  const double denom = std::norm(1.0 + z);
  if (denom == 0.0) throw DomainError("M(z) is undefined at z = -1");
  return {one_minus_abs_sq(z) / denom, -2.0 * z.imag() / denom};
}

MobiusTransfer mobius_transfer(const EigenSamplePair& pair, double epsilon_guard) {
  std::vector<std::size_t> violations;
  for (std::size_t i = 0; i < pair.size(); ++i)
    if (!(std::abs(1.0 + pair.lambdas()[i]) > epsilon_guard)) violations.push_back(i);
  if (!violations.empty())
    throw GuardViolationError(violations,
                              "|1 + lambda_n| <= epsilon_guard at indices " + format_indices(violations));
  for (std::size_t i = 0; i < pair.size(); ++i)
    if (!(std::abs(pair.lambdas()[i]) < 1))
      throw DomainError("mobius_transfer needs |lambda_n| < 1 (index " + std::to_string(i) + ")");

  std::vector<Complex> mapped(pair.size()), coeffs(pair.size());
  double residual = 0.0;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    const Complex l = pair.lambdas()[i];
    mapped[i] = mobius(l);
    coeffs[i] = std::sqrt(2.0) / std::abs(1.0 + l) * pair.coeffs()[i];
    const double disc_ratio =
        std::abs(pair.coeffs()[i]) / (pair.norms()[i] * std::sqrt(one_minus_abs_sq(l)));
    const double half_ratio =
        std::abs(coeffs[i]) / (pair.norms()[i] * std::sqrt(2.0 * mapped[i].real()));
    residual = std::max(residual, std::abs(disc_ratio - half_ratio));
  }
  return {EigenSamplePair(std::move(mapped), std::move(coeffs), pair.norms()), residual};
}

InclusionReport spectrum_inclusion_report(const std::vector<Complex>& lambdas, Regime regime) {
  InclusionReport report;
  switch (regime) {
    case Regime::kDiscDiscrete:
      report.region = "disc |lambda| < 1";
      report.alpha = 1.0;
      for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!(std::abs(lambdas[i]) < 1)) report.offenders.push_back(i);
      break;
    case Regime::kHalfplaneContinuous:
      for (const Complex& l : lambdas) report.alpha = std::max(report.alpha, l.real());
      report.region = "half-strip 0 < Re lambda <= alpha";
      for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (!(lambdas[i].real() > 0)) report.offenders.push_back(i);
      break;
    case Regime::kFiniteContinuous:
      for (const Complex& l : lambdas) report.alpha = std::max(report.alpha, std::abs(l.real()));
      report.region = "strip |Re lambda| <= alpha";
      break;
  }
  report.inside = report.offenders.empty();
  return report;
}

}  // namespace obsdict
