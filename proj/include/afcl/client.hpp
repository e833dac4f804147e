#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "afcl/data.hpp"
#include "afcl/init.hpp"
#include "afcl/matrix.hpp"

namespace afcl {

// Per-round winning counts and the frequency-sensitive weights derived from
// them: gamma_r = s_r / sum(s).
class WinState {
public:
    explicit WinState(std::size_t k);
    WinState(std::vector<double> counts);

    const std::vector<double>& counts() const noexcept { return counts_; }
    const std::vector<double>& gamma() const noexcept { return gamma_; }
    std::size_t k() const noexcept { return counts_.size(); }

    void record_win(std::size_t winner);

private:
    void recompute();

    std::vector<double> counts_;
    std::vector<double> gamma_;
    double total_ = 0.0;
};

// argmin_r gamma_r * ||x - m_r||^2, ties to the lowest index.
std::size_t assign_winner(std::span<const double> x, const Matrix& seeds,
                          std::span<const double> gamma);

WinState record_win(WinState state, std::size_t winner);

Point update_intensity(std::span<const double> x, std::span<const double> winner, double eta);

// Per-seed ordered lists of intensity vectors eta * (x - m_r).
struct UpdateIntensitySet {
    std::vector<std::vector<Point>> per_seed;

    std::size_t total() const noexcept;
};

struct LocalCenters {
    Matrix centers;                 // row r meaningful only when sizes[r] > 0
    std::vector<std::size_t> sizes;
};

LocalCenters local_centers(const Matrix& data, const std::vector<std::size_t>& winners, std::size_t k);

// z_r = sum over rows of cluster r of ||b_r - x||^2. Zero for empty clusters.
std::vector<double> local_contributions(const Matrix& data, const std::vector<std::size_t>& winners,
                                        const Matrix& centers);

// What one client sends after a round. Raw rows and the per-row winner list
// stay on the client; only counts, centers, contributions and intensities leave.
struct ClientUpload {
    std::size_t client_id = 0;
    std::size_t round_index = 0;
    Matrix centers;                 // B
    std::vector<double> contributions;  // z
    std::vector<std::size_t> sizes;     // o
    UpdateIntensitySet intensities;     // R

    bool has_center(std::size_t r) const noexcept { return sizes[r] > 0; }
};

// How the win weights evolve during one pass over the client's rows.
//   online: s starts at all-ones and gamma is refreshed after every object.
//   frozen: gamma stays uniform for the whole pass (plain nearest seed);
//           s is still counted.
enum class GammaMode { online, frozen };

struct ClientRoundOptions {
    double eta = 0.05;
    GammaMode gamma = GammaMode::online;
    bool shuffle = false;          // seeded processing order instead of stored order
    std::uint64_t shuffle_seed = 0;
};

// Full round result, including the client-private winner list.
struct ClientRoundResult {
    ClientUpload upload;
    std::vector<std::size_t> winners;  // per row; the row order is the stored order
    std::vector<std::size_t> order;    // processing order of rows
};

ClientRoundResult client_round_detailed(const ClientDataset& client, const SeedSet& seeds,
                                        std::size_t round_index, const ClientRoundOptions& options);

ClientUpload client_round(const ClientDataset& client, const SeedSet& seeds, std::size_t round_index,
                          const ClientRoundOptions& options);

}  // namespace afcl
