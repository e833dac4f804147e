#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "afcl/data.hpp"
#include "afcl/init.hpp"
#include "afcl/matrix.hpp"
#include "afcl/server.hpp"

namespace afcl {

struct ParticipationSchedule {
    std::vector<double> probs;  // one per client, each in (0, 1]
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct RunConfig {
    std::size_t k0 = 8;
    double xi = 1.0;
    double eta = 0.05;
    std::size_t max_iter = 100;
    double conv_rel_tol = 1e-3;
    std::size_t conv_patience = 3;
    std::optional<double> merge_radius;  // defaults to 0.01 * sqrt(d)
    ParticipationSchedule schedule;
    std::uint64_t rng_seed = 0;
    bool literal_eq9 = false;
    bool balance = true;
    WinnerAnchor anchor = WinnerAnchor::broadcast;
    bool shuffle_rows = false;
    GammaMode gamma = GammaMode::frozen;
    ServerConfig::ObjectiveSource objective_source = ServerConfig::ObjectiveSource::latest;
    double dup_threshold = 1e-6;
    bool skip_homogenized_pairs = true;  // seeds within merge_radius are not rivals in Z

    void validate() const;
    double merge_radius_for(std::size_t d) const;
    ServerConfig server_config(std::size_t d) const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double objective = 0.0;      // NaN while undefined
    double objective_all_k = 0.0;
    std::size_t supported = 0;
    std::vector<std::size_t> participants;  // client ids, ascending
    double displacement_bound = 0.0;
    double seconds = 0.0;  // wall time of the client and server work for this round
};

struct ClusterReport {
    SeedSet initial_seeds;
    SeedSet final_seeds;
    Matrix merged_centers;
    std::vector<std::size_t> seed_to_cluster;
    std::size_t learned_k = 0;
    std::vector<int> assignment;      // concatenated in client/row order
    std::vector<std::size_t> global_rows;  // the partitioned-matrix row behind each assignment entry
    std::vector<IterationRecord> iterations;
    std::vector<Matrix> trajectories;  // snapshot 0 is the initialization
    std::optional<double> silhouette;
    std::optional<double> calinski_harabasz;
    std::size_t iterations_run = 0;
    bool converged = false;
    std::vector<std::size_t> theta;
    std::vector<double> final_weights;

    std::vector<double> objective_history() const;
};

// Each client joins independently with its probability, from a stream keyed
// by (rng_seed, iteration). Empty draws are retried; after 100 failures the
// most likely client is forced in.
std::vector<std::size_t> sample_participants(const ParticipationSchedule& schedule, std::size_t iteration);

// True once |Z_t - Z_{t-1}| / max(|Z_{t-1}|, eps) < tol for `patience`
// consecutive steps, or when `max_iter` is given and reached.
bool check_convergence(const std::vector<double>& objective, double rel_tol, std::size_t patience,
                       std::optional<std::size_t> max_iter = std::nullopt);

struct MergeResult {
    Matrix centers;
    std::vector<std::size_t> seed_to_cluster;

    std::size_t learned_k() const noexcept { return centers.rows(); }
};

// Single-linkage grouping of seeds closer than merge_radius (Euclidean);
// each group is replaced by its unweighted mean. Groups are numbered by
// their lowest seed index.
MergeResult merge_seeds(const Matrix& seeds, double merge_radius);

// Nearest merged center per row (plain squared Euclidean), client by client.
std::vector<int> final_assignment(const std::vector<ClientDataset>& clients, const Matrix& centers);

// Uniform draw from [k_star, 2 * k_star].
std::size_t draw_initial_k(std::size_t k_star, std::uint64_t rng_seed);

// Client-side k-means++ and pooled server seeding, as run at the start of a run.
SeedSet initialize_seeds(const std::vector<ClientDataset>& clients, std::size_t k0, std::uint64_t rng_seed);

ClusterReport run_clients(const std::vector<ClientDataset>& clients, const RunConfig& config);

// Partitions `data` into probs.size() clients with the k-means split, then runs.
ClusterReport run(const DataMatrix& data, const RunConfig& config);

}  // namespace afcl
