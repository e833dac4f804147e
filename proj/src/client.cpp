#include "afcl/client.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "afcl/rng.hpp"

namespace afcl {

WinState::WinState(std::size_t k) : counts_(k, 1.0) {
    recompute();
}

WinState::WinState(std::vector<double> counts) : counts_(std::move(counts)) {
    recompute();
}

void WinState::record_win(std::size_t winner) {
    if (winner >= counts_.size()) {
        throw std::out_of_range("winner index out of range");
    }
    counts_[winner] += 1.0;
    recompute();
}

void WinState::recompute() {
    total_ = std::accumulate(counts_.begin(), counts_.end(), 0.0);
    gamma_.resize(counts_.size());
    for (std::size_t r = 0; r < counts_.size(); ++r) {
        gamma_[r] = total_ > 0.0 ? counts_[r] / total_ : 1.0 / static_cast<double>(counts_.size());
    }
}

std::size_t assign_winner(std::span<const double> x, const Matrix& seeds,
                          std::span<const double> gamma) {
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < seeds.rows(); ++r) {
        const double cost = gamma[r] * squared_distance(x, seeds.row(r));
        if (cost < best_cost) {
            best_cost = cost;
            best = r;
        }
    }
    return best;
}

WinState record_win(WinState state, std::size_t winner) {
    state.record_win(winner);
    return state;
}

Point update_intensity(std::span<const double> x, std::span<const double> winner, double eta) {
    Point v(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        v[j] = eta * (x[j] - winner[j]);
    }
    return v;
}

std::size_t UpdateIntensitySet::total() const noexcept {
    std::size_t n = 0;
    for (const auto& list : per_seed) {
        n += list.size();
    }
    return n;
}

LocalCenters local_centers(const Matrix& data, const std::vector<std::size_t>& winners, std::size_t k) {
    LocalCenters out{Matrix(k, data.cols()), std::vector<std::size_t>(k, 0)};
    for (std::size_t i = 0; i < data.rows(); ++i) {
        auto b = out.centers.row(winners[i]);
        const auto x = data.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            b[j] += x[j];
        }
        ++out.sizes[winners[i]];
    }
    for (std::size_t r = 0; r < k; ++r) {
        if (out.sizes[r] == 0) {
            continue;
        }
        for (double& v : out.centers.row(r)) {
            v /= static_cast<double>(out.sizes[r]);
        }
    }
    return out;
}

std::vector<double> local_contributions(const Matrix& data, const std::vector<std::size_t>& winners,
                                        const Matrix& centers) {
    std::vector<double> z(centers.rows(), 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        z[winners[i]] += squared_distance(centers.row(winners[i]), data.row(i));
    }
    return z;
}

ClientRoundResult client_round_detailed(const ClientDataset& client, const SeedSet& seeds,
                                        std::size_t round_index, const ClientRoundOptions& options) {
    const Matrix& data = client.data.values;
    const std::size_t k = seeds.k();
    const std::size_t n = data.rows();

    ClientRoundResult result;
    result.order.resize(n);
    std::iota(result.order.begin(), result.order.end(), std::size_t{0});
    if (options.shuffle) {
        Rng rng(derive_seed(options.shuffle_seed, streams::shuffle, round_index));
        for (std::size_t i = n; i > 1; --i) {
            std::swap(result.order[i - 1], result.order[uniform_index(rng, i)]);
        }
    }

    WinState state(k);
    const std::vector<double> uniform = state.gamma();
    result.winners.assign(n, 0);
    UpdateIntensitySet intensities;
    intensities.per_seed.resize(k);
    for (std::size_t i : result.order) {
        const auto x = data.row(i);
        const auto& gamma = options.gamma == GammaMode::online ? state.gamma() : uniform;
        const std::size_t winner = assign_winner(x, seeds.seeds, gamma);
        state.record_win(winner);
        result.winners[i] = winner;
        intensities.per_seed[winner].push_back(update_intensity(x, seeds.seeds.row(winner), options.eta));
    }

    LocalCenters lc = local_centers(data, result.winners, k);
    ClientUpload& up = result.upload;
    up.client_id = client.client_id;
    up.round_index = round_index;
    up.contributions = local_contributions(data, result.winners, lc.centers);
    up.centers = std::move(lc.centers);
    up.sizes = std::move(lc.sizes);
    up.intensities = std::move(intensities);
    return result;
}

ClientUpload client_round(const ClientDataset& client, const SeedSet& seeds, std::size_t round_index,
                          const ClientRoundOptions& options) {
    return client_round_detailed(client, seeds, round_index, options).upload;
}

}  // namespace afcl
