#include "obsdict/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "obsdict/errors.hpp"

namespace obsdict {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) throw NonFiniteError(std::string(what) + " contains NaN or Inf");
}

}  // namespace

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!finite(m(i, j))) return false;
  return true;
}

// ---- Operator ----------------------------------------------------------

Operator::Operator(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
    throw DimensionMismatchError("operator must be square with dim >= 1");
  require_finite(entries_, "operator");
}

Operator Operator::identity(Eigen::Index dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator Operator::diagonal(const std::vector<Complex>& diag) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(diag.size()),
                          static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i)
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  return Operator(std::move(m));
}

// ---- Spectrum ----------------------------------------------------------

Spectrum::Spectrum(std::vector<Complex> mu) : mu_(std::move(mu)) {
  for (const Complex& z : mu_)
    if (!finite(z)) throw NonFiniteError("spectrum contains NaN or Inf");
}

Spectrum Spectrum::from_lambda(const std::vector<Complex>& lambda) {
  std::vector<Complex> mu(lambda.size());
  std::transform(lambda.begin(), lambda.end(), mu.begin(), [](Complex z) { return -z; });
  return Spectrum(std::move(mu));
}

std::vector<Complex> Spectrum::lambda_view() const {
  std::vector<Complex> lambda(mu_.size());
  std::transform(mu_.begin(), mu_.end(), lambda.begin(), [](Complex z) { return -z; });
  return lambda;
}

// ---- DiagonalizableSystem ----------------------------------------------

DiagonalizableSystem::DiagonalizableSystem(Spectrum spectrum, std::optional<Matrix> basis)
    : spectrum_(std::move(spectrum)), basis_(std::move(basis)) {
  const auto n = static_cast<Eigen::Index>(spectrum_.size());
  if (n < 1) throw DimensionMismatchError("spectrum must be non-empty");
  if (basis_) {
    if (basis_->rows() != n || basis_->cols() != n)
      throw DimensionMismatchError("basis must be dim x dim");
    require_finite(*basis_, "basis");
    const std::vector<double> sv = singular_values(*basis_);
    const double tol = static_cast<double>(n) * kEps * sv.front();
    if (sv.back() <= tol) throw InvariantError("eigenvector basis is singular");
    basis_norms_.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) basis_norms_[static_cast<std::size_t>(j)] = basis_->col(j).norm();
  } else {
    basis_norms_.assign(static_cast<std::size_t>(n), 1.0);
  }
}

Matrix DiagonalizableSystem::basis_or_identity() const {
  return basis_ ? *basis_ : Matrix::Identity(dim(), dim());
}

double DiagonalizableSystem::basis_condition() const {
  if (!basis_) return 1.0;
  const std::vector<double> sv = singular_values(*basis_);
  return sv.front() / sv.back();
}

Matrix DiagonalizableSystem::dense() const {
  const Eigen::Index n = dim();
  Vector mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = spectrum_.mu()[static_cast<std::size_t>(i)];
  if (!basis_) return mu.asDiagonal();
  const Matrix& v = *basis_;
  return v * mu.asDiagonal() * v.partialPivLu().inverse();
}

// ---- SamplingFamily / ObservationOperator -------------------------------

SamplingFamily::SamplingFamily(std::vector<Vector> vectors, std::vector<std::string> labels)
    : vectors_(std::move(vectors)), labels_(std::move(labels)) {
  if (vectors_.empty()) throw DimensionMismatchError("sampling family needs at least one vector");
  if (labels_.size() != vectors_.size())
    throw DimensionMismatchError("one label per sampling vector is required");
  for (const Vector& g : vectors_) {
    if (g.size() != vectors_.front().size() || g.size() < 1)
      throw DimensionMismatchError("sampling vectors must share the system dimension");
    require_finite(g, "sampling vector");
  }
}

SamplingFamily::SamplingFamily(std::vector<Vector> vectors)
    : SamplingFamily(vectors, [&] {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < vectors.size(); ++i) labels.push_back("g" + std::to_string(i));
        return labels;
      }()) {}

ObservationOperator ObservationOperator::from_family(const SamplingFamily& family) {
  Matrix rows(static_cast<Eigen::Index>(family.size()), family.dim());
  for (std::size_t i = 0; i < family.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = family.vectors()[i].adjoint();
  return ObservationOperator(std::move(rows));
}

ObservationOperator::ObservationOperator(Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1)
    throw DimensionMismatchError("observation operator must be non-empty");
  require_finite(rows_, "observation operator");
}

SamplingFamily ObservationOperator::to_family(std::vector<std::string> labels) const {
  std::vector<Vector> vectors;
  vectors.reserve(static_cast<std::size_t>(rows_.rows()));
  for (Eigen::Index i = 0; i < rows_.rows(); ++i) vectors.emplace_back(rows_.row(i).adjoint());
  return SamplingFamily(std::move(vectors), std::move(labels));
}

// ---- TimeDomain ----------------------------------------------------------

void validate_time_domain(const TimeDomain& time) {
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DiscreteFinite>) {
          if (t.gamma < 0) throw InvariantError("gamma must be nonnegative");
        } else if constexpr (std::is_same_v<T, DiscreteInfinite>) {
          if (t.truncation < 1) throw InvariantError("truncation K must be positive");
          if (!(t.tail_tol > 0)) throw InvariantError("tail_tol must be positive");
        } else if constexpr (std::is_same_v<T, ContinuousFinite>) {
          if (!(t.tau > 0) || !std::isfinite(t.tau)) throw InvariantError("tau must be positive");
          if (t.panels < 1) throw InvariantError("panels must be >= 1");
          if (t.nodes_per_panel < 2) throw InvariantError("nodes_per_panel must be >= 2");
        } else {
          if (!(t.horizon > 0) || !std::isfinite(t.horizon))
            throw InvariantError("horizon must be positive");
          if (t.panels < 1) throw InvariantError("panels must be >= 1");
          if (t.nodes_per_panel < 2) throw InvariantError("nodes_per_panel must be >= 2");
          if (!(t.tail_tol > 0)) throw InvariantError("tail_tol must be positive");
        }
      },
      time);
}

bool is_continuous(const TimeDomain& time) {
  return std::holds_alternative<ContinuousFinite>(time) ||
         std::holds_alternative<ContinuousInfinite>(time);
}

bool is_infinite(const TimeDomain& time) {
  return std::holds_alternative<DiscreteInfinite>(time) ||
         std::holds_alternative<ContinuousInfinite>(time);
}

std::string time_kind_name(const TimeDomain& time) {
  static const char* names[] = {"discrete_finite", "discrete_infinite", "continuous_finite",
                                "continuous_infinite"};
  return names[time.index()];
}

// ---- SystemSpec ----------------------------------------------------------

SystemSpec::SystemSpec(Dynamics dynamics, SamplingFamily sampling, TimeDomain time,
                       std::optional<Matrix> control)
    : dynamics_(std::move(dynamics)),
      sampling_(std::move(sampling)),
      time_(std::move(time)),
      control_(std::move(control)) {
  dense_ = std::visit(
      [](const auto& d) -> Matrix {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, Operator>)
          return d.matrix();
        else
          return d.dense();
      },
      dynamics_);
  require_finite(dense_, "dynamic operator");
  if (sampling_.dim() != dim())
    throw DimensionMismatchError("sampling vectors do not match the state dimension");
  if (control_) {
    if (control_->rows() != dim() || control_->cols() < 1)
      throw DimensionMismatchError("control operator must be dim x m with m >= 1");
    require_finite(*control_, "control operator");
  }
  validate_time_domain(time_);
  observation_ = ObservationOperator::from_family(sampling_).matrix();
}

SystemSpec SystemSpec::with_time(TimeDomain time) const {
  return SystemSpec(dynamics_, sampling_, std::move(time), control_);
}

// ---- linear algebra --------------------------------------------------------

std::vector<double> singular_values(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).front();
}

Eigen::Index numerical_rank(const Matrix& m, std::optional<double> rel_tol) {
  const std::vector<double> sv = singular_values(m);
  if (sv.empty() || sv.front() == 0.0) return 0;
  const double factor =
      rel_tol ? *rel_tol : static_cast<double>(std::max(m.rows(), m.cols())) * kEps;
  const double cutoff = factor * sv.front();
  return static_cast<Eigen::Index>(
      std::count_if(sv.begin(), sv.end(), [&](double s) { return s > cutoff; }));
}

Matrix matrix_exponential(const Matrix& a, double t) {
  if (a.rows() != a.cols()) throw DimensionMismatchError("exponential of a non-square matrix");
  if (!std::isfinite(t)) throw NonFiniteError("exponential time is not finite");
  require_finite(a, "exponential argument");
  const Eigen::Index n = a.rows();
  Matrix scaled = a * t;
  // 1-norm bounds the 2-norm within sqrt(n); keeping it <= 0.5 makes the
  // order-18 Taylor remainder ~1e-22.
  const double norm1 = scaled.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  if (squarings > 1000) throw OverflowError("exponential argument too large");
  scaled /= std::ldexp(1.0, squarings);

  constexpr int kOrder = 18;
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= kOrder; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) {
    result = result * result;
    if (!all_finite(result)) throw OverflowError("matrix exponential overflowed");
  }
  if (!all_finite(result)) throw OverflowError("matrix exponential overflowed");
  return result;
}

Matrix matrix_exponential(const Operator& a, double t) { return matrix_exponential(a.matrix(), t); }

Matrix operator_power(const Matrix& a, unsigned long k) {
  if (a.rows() != a.cols()) throw DimensionMismatchError("power of a non-square matrix");
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix base = a;
  while (k > 0) {
    if (k & 1UL) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

std::vector<Complex> eigenvalues(const Matrix& a) {
  Eigen::ComplexEigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue iteration failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

DiagonalizableSystem spectral_decomposition(const Matrix& a, double tol) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DimensionMismatchError("spectral decomposition needs a square matrix");
  require_finite(a, "operator");
  Eigen::ComplexEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eigenvalue iteration failed");
  const Matrix v = solver.eigenvectors();
  const std::vector<double> sv = singular_values(v);
  const double cond = sv.back() > 0 ? sv.front() / sv.back()
                                    : std::numeric_limits<double>::infinity();
  if (!(cond <= 1.0 / tol)) {
    std::ostringstream msg;
    msg << "eigenvector basis condition number " << cond << " exceeds " << 1.0 / tol;
    throw NotDiagonalizableError(cond, msg.str());
  }
  const Vector& ev = solver.eigenvalues();
  const Matrix rebuilt = v * ev.asDiagonal() * v.partialPivLu().inverse();
  const double scale = spectral_norm(a);
  const double residual = spectral_norm(rebuilt - a);
  if (residual > tol * std::max(scale, kEps)) {
    std::ostringstream msg;
    msg << "eigen-reconstruction residual " << residual << " exceeds tolerance";
    throw NotDiagonalizableError(cond, msg.str());
  }
  return DiagonalizableSystem(Spectrum({ev.data(), ev.data() + ev.size()}), v);
}

StabilityInfo stability_classification(const Spectrum& spectrum) {
  StabilityInfo info;
  info.omega = -std::numeric_limits<double>::infinity();
  for (const Complex& mu : spectrum.mu()) {
    info.omega = std::max(info.omega, mu.real());
    info.spectral_radius = std::max(info.spectral_radius, std::abs(mu));
  }
  info.exponentially_stable = info.omega < 0;
  info.strongly_stable = info.spectral_radius < 1;
  return info;
}

StabilityInfo stability_classification(const Matrix& a) {
  return stability_classification(Spectrum(eigenvalues(a)));
}

double log_norm(const Matrix& a) {
  const Matrix h = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace obsdict
