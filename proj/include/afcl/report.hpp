#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "json.hpp"

#include "afcl/orchestrator.hpp"

namespace afcl {

// Everything in the report except per-round wall times, so two runs with the
// same inputs serialize to identical bytes. Undefined values become null.
nlohmann::json report_to_json(const ClusterReport& report);

// Columns: iteration, seed_id, dim_0..dim_{d-1}. Iteration 0 is the
// initialization.
void write_trajectory_csv(std::ostream& out, const ClusterReport& report);

// Columns: iteration, Z, participant_ids (ids joined with ';'). An undefined
// Z is written as an empty cell.
void write_objective_csv(std::ostream& out, const ClusterReport& report);

struct Stat {
    double mean = 0.0;
    double std = 0.0;   // sample standard deviation; 0 for a single value
    std::size_t count = 0;
};

// Non-finite values are left out.
Stat describe(const std::vector<double>& values);

// mean/std/count of SC, CH, learned_k, iterations, plus the convergence count.
nlohmann::json summarize(const std::vector<ClusterReport>& reports);

// Writes report_<t>.json, trajectory_<t>.csv and objective_<t>.csv into dir.
void write_trial_files(const std::filesystem::path& dir, std::size_t trial, const ClusterReport& report,
                       const nlohmann::json& extra = nlohmann::json::object());

// indent < 0 writes compact JSON.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc, int indent = 2);

}  // namespace afcl
