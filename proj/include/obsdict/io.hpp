#pragma once

// File formats: system JSON, eigen/sample pair JSON, observation CSV.

#include <string>

#include "obsdict/criteria.hpp"
#include "obsdict/model.hpp"
#include "obsdict/observability.hpp"

namespace obsdict {

/// Validates every invariant at load; infinite time domains must pass the
/// tail certificate. Errors carry JSON pointer locations.
SystemSpec load_system_string(const std::string& text);
SystemSpec load_system_file(const std::string& path);

EigenSamplePair load_pair_string(const std::string& text);
EigenSamplePair load_pair_file(const std::string& path);

/// Columns time_or_step, sample_label, re, im in index-map order.
std::string observations_to_csv(const ObservabilityMatrix& psi, const SamplingFamily& family,
                                const Vector& y);
/// Parses and checks that the rows follow `psi.index_map` exactly.
Vector observations_from_csv(const std::string& text, const ObservabilityMatrix& psi,
                             const SamplingFamily& family);

std::string read_text_file(const std::string& path);
/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace obsdict
