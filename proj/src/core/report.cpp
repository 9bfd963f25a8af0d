#include "obsdict/report.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "obsdict/dynamics.hpp"
#include "obsdict/errors.hpp"
#include "obsdict/experiments.hpp"
#include "obsdict/format.hpp"

namespace obsdict {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr double kIdentityTol = 1e-12;

// ---- value helpers --------------------------------------------------------

ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }
ojson num(std::optional<double> x) { return x ? num(*x) : ojson(nullptr); }

ojson cplx(Complex z) { return ojson::array({num(z.real()), num(z.imag())}); }

ojson cvec(const Vector& v) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(cplx(v(i)));
  return out;
}

ojson cvec(const std::vector<Complex>& v) {
  ojson out = ojson::array();
  for (const Complex& z : v) out.push_back(cplx(z));
  return out;
}

ojson cmat(const Matrix& m) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(cvec(Vector(m.row(i).transpose())));
  return out;
}

ojson rvec(const std::vector<double>& v) {
  ojson out = ojson::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

// ---- deterministic rendering ---------------------------------------------------

bool is_scalar(const ojson& v) { return !v.is_array() && !v.is_object(); }

bool inline_array(const ojson& v) {
  if (!v.is_array()) return false;
  for (const ojson& e : v) {
    if (is_scalar(e)) continue;
    if (e.is_array() && e.size() <= 2 && std::all_of(e.begin(), e.end(), is_scalar)) continue;
    return false;
  }
  return true;
}

std::string scalar_text(const ojson& v) {
  if (v.is_number_float()) {
    const double x = v.get<double>();
    return std::isfinite(x) ? format_double(x) : "null";
  }
  return v.dump();
}

std::string inline_text(const ojson& v) {
  if (is_scalar(v)) return scalar_text(v);
  std::string out = "[";
  bool first = true;
  for (const ojson& e : v) {
    if (!first) out += ", ";
    first = false;
    out += inline_text(e);
  }
  return out + "]";
}

void dump_json(const ojson& v, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += inner + ojson(it.key()).dump() + ": ";
      dump_json(it.value(), indent + 1, out);
    }
    out += "\n" + pad + "}";
  } else if (v.is_array()) {
    if (inline_array(v)) {
      out += inline_text(v);
      return;
    }
    out += "[\n";
    bool first = true;
    for (const ojson& e : v) {
      if (!first) out += ",\n";
      first = false;
      out += inner;
      dump_json(e, indent + 1, out);
    }
    out += "\n" + pad + "]";
  } else {
    out += scalar_text(v);
  }
}

void dump_text(const ojson& v, const std::string& prefix, std::string& out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      dump_text(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (v.is_array() && !inline_array(v)) {
    for (std::size_t i = 0; i < v.size(); ++i)
      dump_text(v[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    std::string value = inline_text(v);
    if (v.is_string()) value = v.get<std::string>();
    out += prefix + ": " + value + "\n";
  }
}

std::string render(const ojson& doc, Format format) {
  std::string out;
  if (format == Format::kText) {
    dump_text(doc, "", out);
  } else {
    dump_json(doc, 0, out);
    out += "\n";
  }
  return out;
}

// ---- report blocks -------------------------------------------------------------

ojson tolerances_block(const RunOptions& o) {
  const Tolerances& t = o.tol;
  ojson j;
  j["eob_rel_tol"] = num(t.eob_rel_tol);
  j["rank_rel_tol"] = t.rank_rel_tol ? num(*t.rank_rel_tol) : ojson("max(dim)*eps");
  j["delta_floor"] = num(t.delta_floor);
  j["c1_floor"] = num(t.c1_floor);
  j["c2_cap"] = num(t.c2_cap);
  j["epsilon_guard"] = num(t.epsilon_guard);
  j["trend_window"] = t.trend_window > 0 ? ojson(t.trend_window) : ojson("max(5,N/4)");
  j["trend_tol"] = num(t.trend_tol);
  j["trend_ratio"] = num(t.trend_ratio);
  j["diagonalizability_cond_max"] = num(1.0 / t.diag_tol);
  j["bessel_tol"] = num(t.bessel_tol);
  j["admissibility_slack"] = num(1e-8);
  j["identity_tol"] = num(kIdentityTol);
  return j;
}

ojson time_block(const TimeDomain& time) {
  ojson j;
  j["kind"] = time_kind_name(time);
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DiscreteFinite>) {
          j["gamma"] = t.gamma;
        } else if constexpr (std::is_same_v<T, DiscreteInfinite>) {
          j["truncation"] = t.truncation;
          j["tail_tol"] = num(t.tail_tol);
        } else if constexpr (std::is_same_v<T, ContinuousFinite>) {
          j["tau"] = num(t.tau);
          j["panels"] = t.panels;
          j["nodes_per_panel"] = t.nodes_per_panel;
        } else {
          j["horizon"] = num(t.horizon);
          j["panels"] = t.panels;
          j["nodes_per_panel"] = t.nodes_per_panel;
          j["tail_tol"] = num(t.tail_tol);
        }
      },
      time);
  return j;
}

ojson system_block(const SystemSpec& sys) {
  ojson j;
  j["dim"] = sys.dim();
  j["operator_kind"] = sys.diagonal() ? "diagonal" : "dense";
  j["time"] = time_block(sys.time());
  j["samples"] = sys.sampling().size();
  j["labels"] = sys.sampling().labels();
  j["control_inputs"] = sys.control() ? ojson(sys.control()->cols()) : ojson(nullptr);
  return j;
}

ojson tail_block(const std::optional<TailCertificate>& cert) {
  if (!cert) return nullptr;
  ojson j;
  j["ok"] = cert->ok;
  j["tail_bound"] = num(cert->tail_bound);
  j["suggested_truncation"] = num(cert->suggested_truncation);
  j["method"] = cert->method;
  return j;
}

ojson frame_block(const FrameReport& r) {
  ojson j;
  j["c1"] = num(r.c1);
  j["c2"] = num(r.c2);
  j["rank"] = r.rank;
  j["condition_number"] = num(r.condition_number);
  j["verdicts"] = {{"bessel_admissible", r.verdicts.bessel_admissible},
                   {"complete_aob", r.verdicts.complete_aob},
                   {"frame_eob", r.verdicts.frame_eob}};
  return j;
}

ojson stability_block(const StabilityInfo& s) {
  return {{"exponentially_stable", s.exponentially_stable},
          {"omega", num(s.omega)},
          {"strongly_stable", s.strongly_stable},
          {"spectral_radius", num(s.spectral_radius)}};
}

std::string horizon_phrase(const TimeDomain& time) {
  return std::visit(
      [](const auto& t) -> std::string {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DiscreteFinite>)
          return "at time gamma = " + std::to_string(t.gamma);
        else if constexpr (std::is_same_v<T, ContinuousFinite>)
          return "at time tau = " + format_double(t.tau);
        else
          return "at infinite time";
      },
      time);
}

ojson entry(bool value, const std::string& sampling, const std::string& control) {
  return {{"value", value}, {"sampling", sampling}, {"control", control}};
}

ojson frame_dictionary(const SystemSpec& sys, const FrameVerdicts& v) {
  const bool cont = is_continuous(sys.time());
  const std::string family = cont ? "{e^{tA*} g}" : "{(A*)^k g}";
  const std::string frame = cont ? "a semi-continuous frame for X" : "a frame for X";
  const std::string when = horizon_phrase(sys.time());
  ojson d;
  d["frame_eob"] = entry(v.frame_eob, family + " is " + frame, "(A,B) is exactly observable " + when);
  d["complete_aob"] =
      entry(v.complete_aob, family + " is a complete system", "(A,B) is approximately observable " + when);
  d["bessel_admissible"] =
      entry(v.bessel_admissible, family + " is a Bessel system", "B is an admissible observation operator " + when);
  d["observability_map"] = {{"sampling", "analysis operator of " + family}, {"control", "Psi"}};
  d["grammian"] = {{"sampling", "frame operator of " + family}, {"control", "Q = Psi* Psi"}};
  return d;
}

ojson base_document(Command command, const RunOptions& options) {
  ojson doc;
  doc["tool"] = "obsdict";
  doc["version"] = kToolVersion;
  doc["command"] = command_name(command);
  doc["tolerances"] = tolerances_block(options);
  return doc;
}

const SystemSpec& need_system(const RunInputs& in) {
  if (!in.system) throw InvalidArgumentError("this command needs --system");
  return *in.system;
}

const EigenSamplePair& need_pair(const RunInputs& in) {
  if (!in.pair) throw InvalidArgumentError("this command needs --samples (eigen/sample pair JSON)");
  return *in.pair;
}

ojson condition_block(const Condition& c) {
  ojson j;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["witness"] = num(c.witness);
  j["witness_index"] = c.witness_index ? ojson(*c.witness_index) : ojson(nullptr);
  j["note"] = c.note;
  return j;
}

ojson criteria_block(const CriteriaReport& r) {
  ojson j;
  j["regime"] = regime_name(r.regime);
  j["evidence"] = "finite-section evidence";
  ojson conds = ojson::array();
  for (const Condition& c : r.conditions) conds.push_back(condition_block(c));
  j["conditions"] = conds;
  ojson dups = ojson::array();
  for (const auto& [a, b] : r.duplicate_pairs) dups.push_back({a, b});
  j["duplicate_pairs"] = dups;
  j["overall"] = r.overall;
  return j;
}

ojson inclusion_block(const InclusionReport& r) {
  return {{"inside", r.inside}, {"region", r.region}, {"alpha", num(r.alpha)}, {"offenders", r.offenders}};
}

ojson en_norms_block(const EigenSamplePair& pair, Regime regime, std::optional<double> tau) {
  ojson out = ojson::array();
  for (std::size_t i = 0; i < pair.size(); ++i) {
    // ||B phi_n|| = |<b, phi_n>| for a rank-one B.
    try {
      out.push_back(num(en_norm_squared(pair.lambdas()[i], std::abs(pair.coeffs()[i]), regime, tau)));
    } catch (const ConvergenceError&) {
      out.push_back(nullptr);
    }
  }
  return out;
}

// ---- commands ------------------------------------------------------------------

RenderedReport finish(ojson doc, bool verdict, const RunOptions& options) {
  doc["verdict"] = verdict;
  return {render(doc, options.format), verdict};
}

RenderedReport run_check(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  ojson doc = base_document(Command::kCheck, o);
  doc["system"] = system_block(sys);
  const FrameReport fr = frame_report(sys, o.tol);
  ojson result;
  result["frame"] = frame_block(fr);
  result["stability"] = stability_block(stability_classification(sys.a()));
  if (is_continuous(sys.time())) {
    try {
      const AdmissibilityCheck adm = admissibility_bound_check(sys);
      result["admissibility"] = {{"applicable", true}, {"form", adm.form}, {"c2", num(adm.c2)},
                                 {"bound", num(adm.bound)}, {"satisfied", adm.satisfied}};
    } catch (const NotApplicableError& e) {
      result["admissibility"] = {{"applicable", false}, {"reason", e.what()}};
    }
  }
  if (sys.control() && !is_infinite(sys.time())) {
    const ControllabilityReport c =
        controllability_tests(sys, std::sqrt(o.tol.eob_rel_tol), o.tol.rank_rel_tol);
    result["controllability"] = {{"eco", c.eco}, {"aco", c.aco}, {"reach_rank", c.reach_rank},
                                 {"sigma_min", num(c.sigma_min)}, {"sigma_max", num(c.sigma_max)}};
  }
  doc["result"] = result;
  doc["tail_certificate"] = tail_block(fr.tail_certificate);
  doc["dictionary"] = frame_dictionary(sys, fr.verdicts);
  ojson notes = ojson::array();
  if (is_infinite(sys.time()) && fr.tail_certificate)
    notes.push_back(
        "infinite-time verdict obtained from a certified truncation of a finite-dimensional model; "
        "in infinite dimension a stable operator sampled by finitely many vectors is never a frame "
        "at infinite time");
  doc["notes"] = notes;
  return finish(std::move(doc), fr.verdicts.frame_eob, o);
}

RenderedReport run_reconstruct(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  if (!in.observations) throw InvalidArgumentError("reconstruct needs --samples (observation CSV)");
  ojson doc = base_document(Command::kReconstruct, o);
  doc["system"] = system_block(sys);
  const Reconstruction rec = reconstruct(sys, *in.observations, o.tol);
  const FrameReport fr = frame_report(sys, o.tol);
  doc["result"] = {{"x0", cvec(rec.x0)}, {"residual", num(rec.residual)}, {"frame", frame_block(fr)}};
  doc["tail_certificate"] = tail_block(fr.tail_certificate);
  doc["dictionary"] = {
      {"x0", {{"sampling", "synthesis by the canonical dual frame applied to the samples"},
              {"control", "x0 = (Psi* Psi)^{-1} Psi* y, the Moore-Penrose inverse of Psi"}}}};
  return finish(std::move(doc), true, o);
}

RenderedReport run_criteria(const RunInputs& in, const RunOptions& o) {
  const EigenSamplePair& pair = need_pair(in);
  ojson doc = base_document(Command::kCriteria, o);
  ojson result;
  result["regime"] = regime_name(o.regime);
  result["size"] = pair.size();
  bool verdict = false;
  const InclusionReport inclusion = spectrum_inclusion_report(pair.lambdas(), o.regime);
  result["spectrum_inclusion"] = inclusion_block(inclusion);
  switch (o.regime) {
    case Regime::kDiscDiscrete: {
      const CriteriaReport r = one_point_frame_check(pair, o.tol);
      result["criteria"] = criteria_block(r);
      verdict = r.overall;
      break;
    }
    case Regime::kHalfplaneContinuous: {
      const CriteriaReport r = continuous_infinite_check(pair, o.tol);
      result["criteria"] = criteria_block(r);
      verdict = r.overall;
      break;
    }
    case Regime::kFiniteContinuous: {
      const NormRatioResult nr = norm_ratio_condition(pair, o.regime, o.tol);
      result["norm_ratio"] = {{"ratios", rvec(nr.ratios)}, {"c1_hat", num(nr.c1_hat)},
                              {"c2_hat", num(nr.c2_hat)}, {"decaying", nr.decaying},
                              {"growing", nr.growing}, {"sup_abs_real", num(nr.sup_abs_real)},
                              {"pass", nr.pass}};
      verdict = nr.pass && inclusion.inside;
      break;
    }
  }
  if (o.regime != Regime::kFiniteContinuous || o.tau)
    result["en_norm_squared"] = en_norms_block(pair, o.regime, o.tau);
  doc["result"] = result;
  doc["tail_certificate"] = tail_block(TailCertificate::closed_form_path());
  doc["dictionary"] = {
      {"overall", {{"value", verdict},
                   {"sampling", o.regime == Regime::kDiscDiscrete ? "{(A*)^k b} is a frame for X"
                                                                  : "{e^{tA*} b} is a semi-continuous frame for X"},
                   {"control", o.regime == Regime::kFiniteContinuous
                                   ? "||E_n|| is equivalent to ||phi_n||"
                                   : "(A,B) is exactly observable at infinite time"}}}};
  return finish(std::move(doc), verdict, o);
}

RenderedReport run_mobius(const RunInputs& in, const RunOptions& o) {
  const EigenSamplePair& pair = need_pair(in);
  ojson doc = base_document(Command::kMobius, o);
  const MobiusTransfer transfer = mobius_transfer(pair, o.tol.epsilon_guard);
  const CriteriaReport disc = one_point_frame_check(pair, o.tol);
  const CriteriaReport half = continuous_infinite_check(transfer.halfplane_pair, o.tol);

  double factor_gap = 0.0;
  const std::size_t n = pair.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (i != k)
        factor_gap = std::max(factor_gap,
                              std::abs(disc_factor(pair.lambdas()[i], pair.lambdas()[k]) -
                                       halfplane_factor(transfer.halfplane_pair.lambdas()[i],
                                                        transfer.halfplane_pair.lambdas()[k])));
  bool verdicts_match = true;
  ojson per_condition = ojson::array();
  for (std::size_t c = 0; c < disc.conditions.size(); ++c) {
    const bool same = disc.conditions[c].pass == half.conditions[c].pass;
    verdicts_match = verdicts_match && same;
    per_condition.push_back({{"condition", c + 1},
                             {"disc", disc.conditions[c].pass},
                             {"halfplane", half.conditions[c].pass},
                             {"match", same}});
  }
  ojson mapped;
  mapped["lambda"] = cvec(transfer.halfplane_pair.lambdas());
  mapped["coeff"] = cvec(transfer.halfplane_pair.coeffs());
  ojson result;
  result["identity_residual"] = num(transfer.identity_residual);
  result["factor_correspondence_gap"] = num(factor_gap);
  result["halfplane_pair"] = mapped;
  result["disc_criteria"] = criteria_block(disc);
  result["halfplane_criteria"] = criteria_block(half);
  result["condition_match"] = per_condition;
  doc["result"] = result;
  doc["tail_certificate"] = tail_block(TailCertificate::closed_form_path());
  const bool verdict =
      transfer.identity_residual <= kIdentityTol && factor_gap <= kIdentityTol && verdicts_match;
  doc["dictionary"] = {
      {"transfer", {{"value", verdict},
                    {"sampling", "{(A*)^k b} is a frame iff {e^{tM(A)*} b~} is a semi-continuous frame"},
                    {"control", "(A,B) discrete EOB at infinite time iff (M(A),B~) continuous EOB at infinite time"}}}};
  return finish(std::move(doc), verdict, o);
}

RenderedReport run_duality(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  ojson doc = base_document(Command::kDuality, o);
  doc["system"] = system_block(sys);
  const DualityReport d = duality_check(sys, o.tol);
  ojson result;
  result["adjoint_identity_error"] = num(d.adjoint_identity_error);
  result["unreflected_error"] = num(d.unreflected_error);
  result["reflection_needed"] = d.reflection_needed;
  result["sigma_min_psi"] = num(d.sigma_min_psi);
  result["sigma_min_dual"] = num(d.sigma_min_dual);
  result["eob"] = d.eob;
  result["aob"] = d.aob;
  result["dual_eco"] = d.dual_eco;
  result["dual_aco"] = d.dual_aco;
  result["eob_iff_dual_eco"] = d.eob_iff_dual_eco;
  result["aob_iff_dual_aco"] = d.aob_iff_dual_aco;
  doc["result"] = result;
  doc["tail_certificate"] = nullptr;
  doc["dictionary"] = {
      {"eob_iff_dual_eco", {{"value", d.eob_iff_dual_eco},
                            {"sampling", "frame for X iff the synthesis operator is onto"},
                            {"control", "(A,B) exactly observable iff (A*,B*) exactly controllable"}}},
      {"aob_iff_dual_aco", {{"value", d.aob_iff_dual_aco},
                            {"sampling", "complete system iff the synthesis operator has dense range"},
                            {"control", "(A,B) approximately observable iff (A*,B*) approximately controllable"}}}};
  return finish(std::move(doc), d.eob_iff_dual_eco && d.aob_iff_dual_aco, o);
}

RenderedReport run_sweep(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  const SweepResult sweep = discretization_sweep(sys, o.deltas, o.tol);
  if (o.format == Format::kTsv) return {sweep_tsv(sweep), sweep.all_frames};
  ojson doc = base_document(Command::kSweep, o);
  doc["system"] = system_block(sys);
  ojson rows = ojson::array();
  for (const SweepRow& r : sweep.rows)
    rows.push_back({{"delta", num(r.delta)}, {"c1", num(r.report.c1)}, {"c2", num(r.report.c2)},
                    {"c1_ref_gap", num(r.c1_gap)}, {"c2_ref_gap", num(r.c2_gap)},
                    {"frame_eob", r.report.verdicts.frame_eob}});
  ojson result;
  result["reference"] = frame_block(sweep.reference);
  result["rows"] = rows;
  result["threshold_delta"] = num(sweep.threshold_delta);
  result["all_frames"] = sweep.all_frames;
  doc["result"] = result;
  doc["tail_certificate"] = nullptr;
  doc["dictionary"] = {{"all_frames", {{"value", sweep.all_frames},
                                       {"sampling", "{e^{t_i A*} g} on every sampled grid is a frame for X"},
                                       {"control", "time-sampled observation is exact"}}}};
  return finish(std::move(doc), sweep.all_frames, o);
}

RenderedReport run_kalman(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  const long k = o.truncation.value_or(static_cast<long>(sys.dim()) - 1);
  const KalmanReport r = kalman_independence(sys, o.taus, k, o.tol);
  ojson doc = base_document(Command::kKalman, o);
  doc["system"] = system_block(sys);
  doc["result"] = {{"taus", rvec(o.taus)}, {"ranks", r.ranks}, {"discrete_truncation", r.truncation},
                   {"discrete_rank", r.discrete_rank}, {"kalman_rank", r.kalman_rank},
                   {"all_equal", r.all_equal}};
  doc["tail_certificate"] = nullptr;
  doc["dictionary"] = {{"all_equal", {{"value", r.all_equal},
                                      {"sampling", "completeness of {e^{tA*} g} does not depend on the horizon"},
                                      {"control", "approximate observability at one time is observability at all times"}}}};
  return finish(std::move(doc), r.all_equal, o);
}

RenderedReport run_truncation(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  const TruncationBound t = stable_truncation_bound(sys, o.tol);
  ojson doc = base_document(Command::kTruncation, o);
  doc["system"] = system_block(sys);
  doc["result"] = {{"gamma_star", t.gamma_star},   {"predicted_lower", num(t.predicted_lower)},
                   {"measured_c1", num(t.measured_c1)}, {"c1_infinite", num(t.c1_infinite)},
                   {"c2_infinite", num(t.c2_infinite)}, {"a_norm", num(t.a_norm)},
                   {"baseline", t.baseline},          {"ok", t.ok}};
  doc["tail_certificate"] = nullptr;
  doc["dictionary"] = {{"ok", {{"value", t.ok},
                               {"sampling", "{(A*)^k g}, k <= gamma*, is already a frame for X"},
                               {"control", "exactly observable at the finite time gamma*"}}}};
  return finish(std::move(doc), t.ok, o);
}

RenderedReport run_bessel(const RunInputs& in, const RunOptions& o) {
  const SystemSpec& sys = need_system(in);
  double tau = 0.0;
  if (o.tau) {
    tau = *o.tau;
  } else if (const auto* cf = std::get_if<ContinuousFinite>(&sys.time())) {
    tau = cf->tau;
  } else {
    throw InvalidArgumentError("bessel-op needs --tau or a continuous_finite time domain");
  }
  const BesselOperatorReport r = bessel_admissibility_operator(sys.a(), tau, o.tol.bessel_tol, o.tau_max);
  ojson doc = base_document(Command::kBesselOp, o);
  doc["system"] = system_block(sys);
  doc["result"] = {{"tau", num(tau)},
                   {"t_matrix", cmat(r.t_series)},
                   {"series_vs_quadrature_error", num(r.series_vs_quadrature_error)},
                   {"spectral_certificate", cvec(r.spectral_certificate)},
                   {"min_abs_g", num(r.min_abs_g)},
                   {"invertible", r.invertible},
                   {"certified_tau", num(r.certified_tau)}};
  doc["tail_certificate"] = nullptr;
  doc["dictionary"] = {{"invertible", {{"value", r.invertible},
                                       {"sampling", "the averaged samples int_0^tau e^{tA*} g dt keep a frame"},
                                       {"control", "T = int_0^tau e^{tA} dt is invertible"}}}};
  return finish(std::move(doc), r.invertible, o);
}

}  // namespace

Command parse_command(const std::string& name) {
  static const std::pair<const char*, Command> table[] = {
      {"check", Command::kCheck},       {"reconstruct", Command::kReconstruct},
      {"criteria", Command::kCriteria}, {"mobius", Command::kMobius},
      {"duality", Command::kDuality},   {"sweep", Command::kSweep},
      {"kalman", Command::kKalman},     {"truncation", Command::kTruncation},
      {"bessel-op", Command::kBesselOp}};
  for (const auto& [n, c] : table)
    if (name == n) return c;
  throw InvalidArgumentError("unknown command '" + name + "'");
}

std::string command_name(Command command) {
  switch (command) {
    case Command::kCheck: return "check";
    case Command::kReconstruct: return "reconstruct";
    case Command::kCriteria: return "criteria";
    case Command::kMobius: return "mobius";
    case Command::kDuality: return "duality";
    case Command::kSweep: return "sweep";
    case Command::kKalman: return "kalman";
    case Command::kTruncation: return "truncation";
    case Command::kBesselOp: return "bessel-op";
  }
  return "unknown";
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::kJson;
  if (name == "text") return Format::kText;
  if (name == "tsv") return Format::kTsv;
  throw InvalidArgumentError("unknown format '" + name + "' (json|text|tsv)");
}

RenderedReport run_command(Command command, const RunInputs& inputs, const RunOptions& options) {
  if (options.format == Format::kTsv && command != Command::kSweep)
    throw InvalidArgumentError("tsv output is only available for sweep");
  switch (command) {
    case Command::kCheck: return run_check(inputs, options);
    case Command::kReconstruct: return run_reconstruct(inputs, options);
    case Command::kCriteria: return run_criteria(inputs, options);
    case Command::kMobius: return run_mobius(inputs, options);
    case Command::kDuality: return run_duality(inputs, options);
    case Command::kSweep: return run_sweep(inputs, options);
    case Command::kKalman: return run_kalman(inputs, options);
    case Command::kTruncation: return run_truncation(inputs, options);
    case Command::kBesselOp: return run_bessel(inputs, options);
  }
  throw InvalidArgumentError("unknown command");
}

}  // namespace obsdict
