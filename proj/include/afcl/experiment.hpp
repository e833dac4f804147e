#pragma once

#include <ostream>
#include <vector>

#include "afcl/manifest.hpp"
#include "json.hpp"

namespace afcl {

nlohmann::json config_to_json(const RunConfig& c);

// Runs every trial of the manifest, writes the per-trial files and
// summary.json into output_dir (created if needed) and returns the summary.
// Progress lines go to `log` when given.
nlohmann::json run_experiment(const ExperimentManifest& m, std::ostream* log = nullptr);

}  // namespace afcl
