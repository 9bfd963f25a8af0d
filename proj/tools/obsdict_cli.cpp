// obsdict command-line front end over the C API.
//
//   obsdict check --system sys.json
//   obsdict reconstruct --system sys.json --samples y.csv
//   obsdict criteria --samples pair.json --regime disc
//   obsdict sweep --system sys.json --deltas 0.25,0.125 --format tsv
//
// Exit codes: 0 verdict true, 1 verdict false, 2 input error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "obsdict/obsdict.h"

namespace {

struct Deleter {
  void operator()(obsd_system* p) const { obsd_system_free(p); }
  void operator()(obsd_pair* p) const { obsd_pair_free(p); }
  void operator()(obsd_observations* p) const { obsd_observations_free(p); }
  void operator()(obsd_report* p) const { obsd_report_free(p); }
};
template <class T>
using Owned = std::unique_ptr<T, Deleter>;

int report_error(obsd_status status) {
  std::cerr << "obsdict: " << obsd_status_name(status) << ": " << obsd_last_error_message() << "\n";
  return obsd_status_exit_code(status);
}

bool needs_pair(const std::string& command) { return command == "criteria" || command == "mobius"; }
bool needs_observations(const std::string& command) { return command == "reconstruct"; }

int write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return std::cout ? 0 : 2;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "obsdict: IoError: cannot open " << tmp << "\n";
      return 2;
    }
    out << text;
    out.flush();
    if (!out) {
      std::cerr << "obsdict: IoError: write failed for " << tmp << "\n";
      std::remove(tmp.c_str());
      return 2;
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::cerr << "obsdict: IoError: cannot rename " << tmp << " to " << path << "\n";
    std::remove(tmp.c_str());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical sampling / observability toolkit"};
  app.set_version_flag("--version", std::string(obsd_version()));

  std::string command, system_path, samples_path, out_path, format = "json", regime = "disc";
  std::optional<double> tol, rank_tol, delta_floor, epsilon_guard, tau, tau_max;
  std::optional<long> truncation;
  std::vector<double> taus, deltas;

  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember({"check", "reconstruct", "criteria", "mobius", "duality", "sweep", "kalman",
                             "truncation", "bessel-op"}));
  app.add_option("--system", system_path, "System JSON file");
  app.add_option("--samples", samples_path,
                 "Eigen/sample pair JSON (criteria, mobius) or observation CSV (reconstruct)");
  app.add_option("--tol", tol, "Relative frame tolerance: frame iff c1 > tol * c2");
  app.add_option("--rank-tol", rank_tol, "Relative rank cutoff on Grammian eigenvalues (sigma^2 scale)");
  app.add_option("--delta-floor", delta_floor, "Carleson separation floor");
  app.add_option("--epsilon-guard", epsilon_guard, "Guard |1 + lambda| > eps for the Mobius map");
  app.add_option("--out", out_path, "Report path (written atomically); stdout if omitted");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text", "tsv"}));
  app.add_option("--regime", regime, "Criteria regime")->check(CLI::IsMember({"disc", "halfplane", "finite"}));
  app.add_option("--taus", taus, "Kalman horizons, comma separated")->delimiter(',');
  app.add_option("--deltas", deltas, "Sweep grid spacings, comma separated")->delimiter(',');
  app.add_option("--truncation", truncation, "Discrete truncation K for kalman");
  app.add_option("--tau", tau, "Horizon for criteria --regime finite and bessel-op");
  app.add_option("--tau-max", tau_max, "Upper end of the certified-tau search for bessel-op");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  obsd_options opts;
  obsd_options_init(&opts);
  if (tol) opts.eob_rel_tol = *tol;
  if (rank_tol) opts.rank_rel_tol = *rank_tol;
  if (delta_floor) opts.delta_floor = *delta_floor;
  if (epsilon_guard) opts.epsilon_guard = *epsilon_guard;
  opts.format = format == "text" ? OBSD_FORMAT_TEXT : format == "tsv" ? OBSD_FORMAT_TSV : OBSD_FORMAT_JSON;
  opts.regime = regime == "halfplane" ? OBSD_REGIME_HALFPLANE
                : regime == "finite"  ? OBSD_REGIME_FINITE
                                      : OBSD_REGIME_DISC;
  if (!taus.empty()) {
    opts.taus = taus.data();
    opts.n_taus = taus.size();
  }
  if (!deltas.empty()) {
    opts.deltas = deltas.data();
    opts.n_deltas = deltas.size();
  }
  if (truncation) {
    if (*truncation < 0) {
      std::cerr << "obsdict: InvalidArgumentError: --truncation must be >= 0\n";
      return 2;
    }
    opts.truncation = *truncation;
  }
  if (tau) opts.tau = *tau;
  if (tau_max) opts.tau_max = *tau_max;

  Owned<obsd_system> sys;
  Owned<obsd_pair> pair;
  Owned<obsd_observations> obs;
  if (!system_path.empty()) {
    obsd_system* raw = nullptr;
    if (obsd_status s = obsd_system_load_file(system_path.c_str(), &raw); s != OBSD_OK) return report_error(s);
    sys.reset(raw);
  }
  if (!samples_path.empty()) {
    if (needs_pair(command)) {
      obsd_pair* raw = nullptr;
      if (obsd_status s = obsd_pair_load_file(samples_path.c_str(), &raw); s != OBSD_OK) return report_error(s);
      pair.reset(raw);
    } else if (needs_observations(command)) {
      if (!sys) {
        std::cerr << "obsdict: InvalidArgumentError: --samples CSV needs --system\n";
        return 2;
      }
      obsd_observations* raw = nullptr;
      if (obsd_status s = obsd_observations_load_file(sys.get(), samples_path.c_str(), &raw); s != OBSD_OK)
        return report_error(s);
      obs.reset(raw);
    } else {
      std::cerr << "obsdict: InvalidArgumentError: --samples is not used by '" << command << "'\n";
      return 2;
    }
  }

  obsd_report* raw = nullptr;
  if (obsd_status s = obsd_run(command.c_str(), sys.get(), pair.get(), obs.get(), &opts, &raw); s != OBSD_OK)
    return report_error(s);
  Owned<obsd_report> report(raw);
  if (int rc = write_output(out_path, obsd_report_text(report.get())); rc != 0) return rc;
  return obsd_report_verdict(report.get()) ? 0 : 1;
}
