#pragma once

// Command dispatch and deterministic report rendering shared by the C API and
// the CLI.

#include <optional>
#include <string>
#include <vector>

#include "obsdict/criteria.hpp"
#include "obsdict/model.hpp"
#include "obsdict/observability.hpp"

namespace obsdict {

enum class Command { kCheck, kReconstruct, kCriteria, kMobius, kDuality, kSweep, kKalman, kTruncation, kBesselOp };
enum class Format { kJson, kText, kTsv };

Command parse_command(const std::string& name);
std::string command_name(Command command);
Format parse_format(const std::string& name);

struct RunOptions {
  Tolerances tol;
  Format format = Format::kJson;
  Regime regime = Regime::kDiscDiscrete;
  std::vector<double> taus{0.1, 1.0, 10.0};
  std::vector<double> deltas{0.25, 0.125, 0.0625, 0.03125};
  std::optional<long> truncation;
  std::optional<double> tau;
  std::optional<double> tau_max;
};

struct RunInputs {
  const SystemSpec* system = nullptr;
  const EigenSamplePair* pair = nullptr;
  const Vector* observations = nullptr;
};

struct RenderedReport {
  std::string text;
  bool verdict = false;
};

/// Runs one command. Throws obsdict::Error subclasses for input or numerical
/// failures; a negative verdict is a successful run with verdict == false.
RenderedReport run_command(Command command, const RunInputs& inputs, const RunOptions& options);

}  // namespace obsdict
