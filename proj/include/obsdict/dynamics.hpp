#pragma once

#include <string>
#include <variant>
#include <vector>

#include "obsdict/model.hpp"

namespace obsdict {

/// Nodes and positive weights on [0, span()]. Weights of a composite
/// Gauss-Legendre rule sum to the interval length.
class QuadratureGrid {
 public:
  QuadratureGrid(std::vector<double> nodes, std::vector<double> weights, std::string rule);

  static QuadratureGrid gauss_legendre(double length, int panels, int nodes_per_panel);
  /// Left-endpoint rule {0, delta, 2 delta, ...} intersected with [0, length),
  /// each node weighted by delta.
  static QuadratureGrid uniform(double length, double delta);
  /// Left-endpoint rule on an arbitrary partition 0 = p_0 < ... < p_m = length.
  static QuadratureGrid partition(const std::vector<double>& points);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::string& rule() const { return rule_; }
  std::size_t size() const { return nodes_.size(); }
  double weight_sum() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::string rule_;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre_reference(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// u(0), u(1), ...; an empty signal is u = 0.
struct DiscreteSignal {
  std::vector<Vector> values;
};

/// u sampled at the nodes of `grid`; an empty value list is u = 0.
struct ContinuousSignal {
  QuadratureGrid grid;
  std::vector<Vector> values;
};

using ControlSignal = std::variant<DiscreteSignal, ContinuousSignal>;

/// x(k) = A^k x0 + sum_{j<k} A^{k-1-j} C u(j).
Vector evolve_discrete(const SystemSpec& sys, const Vector& x0, const DiscreteSignal& u,
                       long k);

/// x(t) = e^{tA} x0 + quadrature of int_0^t e^{(t-s)A} C u(s) ds on u.grid,
/// which must span exactly [0, t].
Vector evolve_continuous(const SystemSpec& sys, const Vector& x0, const ContinuousSignal& u,
                         double t);

/// Discrete: Theta(k)u = sum_{j=0}^{k} A^{k-j} C u(j). Continuous: the
/// convolution integral over the signal's grid.
Vector controllability_map(const SystemSpec& sys, const DiscreteSignal& u, long k);
Vector controllability_map(const SystemSpec& sys, const ContinuousSignal& u);

/// Matrix of Theta on the discretized control space for the system's finite
/// horizon. Continuous blocks carry sqrt(w_j) so the Euclidean norm of the
/// coefficient vector matches the quadrature L2 norm of u.
Matrix controllability_matrix(const SystemSpec& sys);

struct ControllabilityReport {
  bool eco = false;
  bool aco = false;
  Eigen::Index reach_rank = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// eco: sigma_min(Theta) > eco_rel_tol * sigma_max(Theta); aco: full row rank.
ControllabilityReport controllability_tests(const SystemSpec& sys, double eco_rel_tol = 1e-5,
                                            std::optional<double> rank_rel_tol = std::nullopt);

/// Orthonormal basis of range(Theta(horizon)).
Matrix reachable_space(const SystemSpec& sys, std::optional<double> rank_rel_tol = std::nullopt);

/// Largest principal angle between the column spaces of two orthonormal bases.
double max_principal_angle(const Matrix& q1, const Matrix& q2);

struct TailCertificate {
  bool ok = false;
  double tail_bound = 0.0;
  /// Discrete: K; continuous: horizon T.
  double suggested_truncation = 0.0;
  std::string method;
  bool closed_form = false;

  static TailCertificate closed_form_path();
};

/// Bounds sum_{k>K} ||B A^k x||^2 (or int_T^inf ||B e^{tA} x||^2 dt) by
/// tail_bound * ||x||^2. Throws TailNotCertifiableError for non-stable A or
/// finite time domains.
TailCertificate certify_tail(const SystemSpec& sys);

}  // namespace obsdict
