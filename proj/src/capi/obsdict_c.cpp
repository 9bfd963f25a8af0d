#include "obsdict/obsdict.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "obsdict/errors.hpp"
#include "obsdict/io.hpp"
#include "obsdict/observability.hpp"
#include "obsdict/report.hpp"

struct obsd_system {
  obsdict::SystemSpec spec;
};

struct obsd_pair {
  obsdict::EigenSamplePair pair;
};

struct obsd_observations {
  obsdict::Vector y;
};

struct obsd_report {
  std::string text;
  bool verdict;
};

namespace {

thread_local std::string g_last_error;

obsd_status fail(obsd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes at the boundary.
template <class F>
obsd_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return OBSD_OK;
  } catch (const obsdict::Error& e) {
    return fail(static_cast<obsd_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(OBSD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OBSD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OBSD_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* name) {
  if (!p) throw obsdict::InvalidArgumentError(std::string(name) + " must not be NULL");
}

bool set(double x) { return std::isfinite(x) && x >= 0; }

obsdict::RunOptions to_run_options(const obsd_options* c) {
  obsdict::RunOptions o;
  if (!c) return o;
  if (set(c->eob_rel_tol)) o.tol.eob_rel_tol = c->eob_rel_tol;
  if (std::isfinite(c->rank_rel_tol) && c->rank_rel_tol > 0) o.tol.rank_rel_tol = c->rank_rel_tol;
  if (set(c->delta_floor)) o.tol.delta_floor = c->delta_floor;
  if (set(c->c1_floor)) o.tol.c1_floor = c->c1_floor;
  if (set(c->c2_cap)) o.tol.c2_cap = c->c2_cap;
  if (set(c->epsilon_guard)) o.tol.epsilon_guard = c->epsilon_guard;
  if (c->trend_window > 0) o.tol.trend_window = c->trend_window;
  if (set(c->trend_tol)) o.tol.trend_tol = c->trend_tol;
  switch (c->format) {
    case OBSD_FORMAT_JSON: o.format = obsdict::Format::kJson; break;
    case OBSD_FORMAT_TEXT: o.format = obsdict::Format::kText; break;
    case OBSD_FORMAT_TSV: o.format = obsdict::Format::kTsv; break;
    default: throw obsdict::InvalidArgumentError("unknown output format");
  }
  switch (c->regime) {
    case OBSD_REGIME_DISC: o.regime = obsdict::Regime::kDiscDiscrete; break;
    case OBSD_REGIME_HALFPLANE: o.regime = obsdict::Regime::kHalfplaneContinuous; break;
    case OBSD_REGIME_FINITE: o.regime = obsdict::Regime::kFiniteContinuous; break;
    default: throw obsdict::InvalidArgumentError("unknown regime");
  }
  if (c->taus) o.taus.assign(c->taus, c->taus + c->n_taus);
  if (c->deltas) o.deltas.assign(c->deltas, c->deltas + c->n_deltas);
  if (c->truncation >= 0) o.truncation = c->truncation;
  if (std::isfinite(c->tau) && c->tau > 0) o.tau = c->tau;
  if (std::isfinite(c->tau_max) && c->tau_max > 0) o.tau_max = c->tau_max;
  return o;
}

}  // namespace

extern "C" {

void obsd_options_init(obsd_options* opts) {
  if (!opts) return;
  const obsdict::Tolerances d;
  opts->eob_rel_tol = d.eob_rel_tol;
  opts->rank_rel_tol = -1.0;
  opts->delta_floor = d.delta_floor;
  opts->c1_floor = d.c1_floor;
  opts->c2_cap = d.c2_cap;
  opts->epsilon_guard = d.epsilon_guard;
  opts->trend_window = 0;
  opts->trend_tol = d.trend_tol;
  opts->format = OBSD_FORMAT_JSON;
  opts->regime = OBSD_REGIME_DISC;
  opts->taus = nullptr;
  opts->n_taus = 0;
  opts->deltas = nullptr;
  opts->n_deltas = 0;
  opts->truncation = -1;
  opts->tau = -1.0;
  opts->tau_max = -1.0;
}

const char* obsd_version(void) { return "1.0.0"; }

const char* obsd_last_error_message(void) { return g_last_error.c_str(); }

const char* obsd_status_name(obsd_status status) {
  if (status == OBSD_OK) return "Ok";
  if (status == OBSD_ERR_INTERNAL) return "InternalError";
  static thread_local std::string name;
  name = obsdict::error_code_name(static_cast<obsdict::ErrorCode>(status));
  return name.c_str();
}

int obsd_status_exit_code(obsd_status status) {
  switch (status) {
    case OBSD_OK:
      return 0;
    case OBSD_ERR_OVERFLOW:
    case OBSD_ERR_NOT_DIAGONALIZABLE:
    case OBSD_ERR_QUADRATURE:
    case OBSD_ERR_TAIL_NOT_CERTIFIABLE:
    case OBSD_ERR_CONVERGENCE:
    case OBSD_ERR_NOT_OBSERVABLE:
    case OBSD_ERR_NOT_STRONGLY_STABLE:
    case OBSD_ERR_INTERNAL:
      return 3;
    default:
      return 2;
  }
}

obsd_status obsd_system_load_file(const char* path, obsd_system** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new obsd_system{obsdict::load_system_file(path)};
  });
}

obsd_status obsd_system_load_string(const char* json, obsd_system** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new obsd_system{obsdict::load_system_string(json)};
  });
}

size_t obsd_system_dim(const obsd_system* sys) { return sys ? sys->spec.dim() : 0; }

void obsd_system_free(obsd_system* sys) { delete sys; }

obsd_status obsd_pair_load_file(const char* path, obsd_pair** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new obsd_pair{obsdict::load_pair_file(path)};
  });
}

obsd_status obsd_pair_load_string(const char* json, obsd_pair** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new obsd_pair{obsdict::load_pair_string(json)};
  });
}

void obsd_pair_free(obsd_pair* pair) { delete pair; }

obsd_status obsd_observations_load_string(const obsd_system* sys, const char* csv,
                                          obsd_observations** out) {
  return guarded([&] {
    require(sys, "sys");
    require(csv, "csv");
    require(out, "out");
    const obsdict::ObservabilityMatrix psi = obsdict::observability_matrix(sys->spec);
    *out = new obsd_observations{obsdict::observations_from_csv(csv, psi, sys->spec.sampling())};
  });
}

obsd_status obsd_observations_load_file(const obsd_system* sys, const char* path,
                                        obsd_observations** out) {
  return guarded([&] {
    require(path, "path");
    const std::string text = obsdict::read_text_file(path);
    const obsd_status s = obsd_observations_load_string(sys, text.c_str(), out);
    if (s != OBSD_OK) throw obsdict::Error(static_cast<obsdict::ErrorCode>(s), g_last_error);
  });
}

void obsd_observations_free(obsd_observations* obs) { delete obs; }

obsd_status obsd_run(const char* command, const obsd_system* sys, const obsd_pair* pair,
                     const obsd_observations* obs, const obsd_options* opts, obsd_report** out) {
  return guarded([&] {
    require(command, "command");
    require(out, "out");
    obsdict::RunInputs inputs;
    inputs.system = sys ? &sys->spec : nullptr;
    inputs.pair = pair ? &pair->pair : nullptr;
    inputs.observations = obs ? &obs->y : nullptr;
    obsdict::RenderedReport r =
        obsdict::run_command(obsdict::parse_command(command), inputs, to_run_options(opts));
    *out = new obsd_report{std::move(r.text), r.verdict};
  });
}

const char* obsd_report_text(const obsd_report* report) { return report ? report->text.c_str() : ""; }

int obsd_report_verdict(const obsd_report* report) { return report && report->verdict ? 1 : 0; }

void obsd_report_free(obsd_report* report) { delete report; }

obsd_status obsd_frame_bounds(const obsd_system* sys, double* c1, double* c2, size_t* rank,
                              int* frame_eob) {
  return guarded([&] {
    require(sys, "sys");
    const obsdict::FrameReport r = obsdict::frame_report(sys->spec);
    if (c1) *c1 = r.c1;
    if (c2) *c2 = r.c2;
    if (rank) *rank = static_cast<size_t>(r.rank);
    if (frame_eob) *frame_eob = r.verdicts.frame_eob ? 1 : 0;
  });
}

obsd_status obsd_reconstruct(const obsd_system* sys, const obsd_observations* obs, double* x0_out,
                             double* residual) {
  return guarded([&] {
    require(sys, "sys");
    require(obs, "obs");
    require(x0_out, "x0_out");
    const obsdict::Reconstruction r = obsdict::reconstruct(sys->spec, obs->y);
    for (Eigen::Index i = 0; i < r.x0.size(); ++i) {
      x0_out[2 * i] = r.x0(i).real();
      x0_out[2 * i + 1] = r.x0(i).imag();
    }
    if (residual) *residual = r.residual;
  });
}

obsd_status obsd_matrix_exponential(const double* a, size_t n, double t, double* out) {
  return guarded([&] {
    require(a, "a");
    require(out, "out");
    if (n == 0) throw obsdict::InvalidArgumentError("n must be positive");
    const auto m = static_cast<Eigen::Index>(n);
    obsdict::Matrix mat(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        mat(i, j) = obsdict::Complex(a[2 * (i * m + j)], a[2 * (i * m + j) + 1]);
    const obsdict::Matrix e = obsdict::matrix_exponential(obsdict::Operator(mat).matrix(), t);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        out[2 * (i * m + j)] = e(i, j).real();
        out[2 * (i * m + j) + 1] = e(i, j).imag();
      }
  });
}

obsd_status obsd_carleson_disc(const double* lambdas, size_t n, double* inf_product) {
  return guarded([&] {
    require(lambdas, "lambdas");
    require(inf_product, "inf_product");
    std::vector<obsdict::Complex> z(n);
    for (size_t i = 0; i < n; ++i) z[i] = obsdict::Complex(lambdas[2 * i], lambdas[2 * i + 1]);
    *inf_product = obsdict::carleson_disc(z).inf_product;
  });
}

}  // extern "C"
