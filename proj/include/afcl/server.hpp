#pragma once

#include <optional>
#include <span>
#include <vector>

#include "afcl/client.hpp"
#include "afcl/init.hpp"
#include "afcl/matrix.hpp"

namespace afcl {

// Which winner position the attraction term of the seed update pulls toward.
//   broadcast: the winner as broadcast at the start of the round, i.e. the
//              position the client measured the intensity against, so the
//              step lands on the originating object.
//   rebased:   the intensity is first re-expressed against the winner's
//              current position, v' = v + eta * (m_r(broadcast) - m_r(now)),
//              so both the cooperative radius and the step use the live
//              winner while still pulling toward the originating object.
//   current:   the winner as it stands just before this vector is applied,
//              with the intensity used as uploaded.
enum class WinnerAnchor { broadcast, rebased, current };

struct ServerConfig {
    double eta = 0.05;
    double xi = 1.0;
    bool balance = true;          // false forces w = 1 for every client
    bool literal_eq9 = false;     // divide by sum(o) instead of sum(w * o)
    double dup_threshold = 1e-6;  // squared distance below which two centers are one
    WinnerAnchor anchor = WinnerAnchor::broadcast;
    bool check_bounds = true;     // seeds must stay finite and inside [-1, 2]^d
    // Z from this round's uploads only, or from the latest summary each
    // client has ever sent (absent clients keep their last B, z, o).
    enum class ObjectiveSource { participants, latest } objective_source = ObjectiveSource::participants;
    double homogenized_radius = 0.0;  // 0 disables the seed-distance rule
};

struct ServerState {
    SeedSet seeds;
    std::vector<std::size_t> theta;     // uploads per client so far
    std::vector<double> weights;        // balance weights for the next round
    std::vector<double> objective;      // Z per round over supported seeds; NaN until first defined
    std::vector<double> objective_all;  // same numerator sum averaged over the configured k
    std::vector<std::size_t> supported; // supported seed count per round
    std::size_t iteration = 0;
    std::vector<std::optional<ClientUpload>> latest;  // summaries only; intensities dropped

    static ServerState initial(SeedSet seeds, std::size_t clients);
};

// w_g = xi / (xi + theta_g / sum(theta)); all ones before any upload.
std::vector<double> balance_weights(std::span<const std::size_t> theta, double xi);

struct AggregatedSummary {
    Matrix centers;                   // B
    std::vector<double> contributions;  // z
    std::vector<std::size_t> support;   // uploading clients with o_r > 0
};

// Weighted per-seed aggregation of local centers and contributions. `weights`
// is indexed by client_id - 1.
AggregatedSummary aggregate(std::span<const ClientUpload> uploads, std::span<const double> weights,
                            bool literal_eq9 = false);

struct ObjectiveValue {
    double value = 0.0;        // averaged over supported seeds
    double value_all_k = 0.0;  // averaged over every configured seed
    std::size_t supported = 0;
};

// Seed pairs that count as one homogenized cluster in the objective.
struct HomogenizedSeeds {
    const Matrix* seeds = nullptr;
    double radius = 0.0;  // Euclidean
};

// DBI-form objective over supported seeds. Pairs whose centers are within
// dup_threshold (squared), or whose seeds are within `homogenized.radius`,
// are not admissible partners. Empty when fewer than two seeds are supported.
std::optional<ObjectiveValue> global_objective(const AggregatedSummary& agg,
                                               double dup_threshold = 1e-6,
                                               const HomogenizedSeeds& homogenized = {});

// { l : ||m_r - m_l||^2 <= ||w * v / eta||^2 }, ascending.
std::vector<std::size_t> cooperative_set(const Matrix& seeds, std::size_t r,
                                         std::span<const double> intensity, double weight, double eta);

// m_u += w * v + w * eta * (anchor - m_u) for every u in the set. `anchor`
// is read once before any member moves.
void apply_seed_update(Matrix& seeds, std::span<const std::size_t> members,
                       std::span<const double> anchor, std::span<const double> intensity,
                       double weight, double eta);

// Value form with the anchor taken as the current winner position.
SeedSet apply_seed_update(SeedSet seeds, std::span<const std::size_t> members, std::size_t r,
                          std::span<const double> intensity, double weight, double eta);

struct RoundStats {
    std::size_t vectors = 0;
    bool degenerate = false;
    // Upper bound on how far any seed could have moved this round given the
    // applied vectors, accumulated per seed; max over seeds.
    double displacement_bound = 0.0;
    std::vector<double> per_seed_bound;
};

// One server iteration: count participation, apply every uploaded intensity
// in canonical (client, seed, vector) order using last round's weights,
// aggregate, append Z, and refresh the weights.
RoundStats server_round(ServerState& state, std::vector<ClientUpload> uploads,
                        const ServerConfig& config);

}  // namespace afcl
