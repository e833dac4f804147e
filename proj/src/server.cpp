#include "afcl/server.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace afcl {

ServerState ServerState::initial(SeedSet seeds, std::size_t clients) {
    ServerState s;
    s.seeds = std::move(seeds);
    s.theta.assign(clients, 0);
    s.weights.assign(clients, 1.0);
    s.latest.assign(clients, std::nullopt);
    return s;
}

std::vector<double> balance_weights(std::span<const std::size_t> theta, double xi) {
    if (!(xi > 0.0)) {
        throw std::invalid_argument("xi must be positive");
    }
    const double total = static_cast<double>(std::accumulate(theta.begin(), theta.end(), std::size_t{0}));
    std::vector<double> w(theta.size(), 1.0);
    if (total == 0.0) {
        return w;
    }
    for (std::size_t g = 0; g < theta.size(); ++g) {
        w[g] = xi / (xi + static_cast<double>(theta[g]) / total);
    }
    return w;
}

AggregatedSummary aggregate(std::span<const ClientUpload> uploads, std::span<const double> weights,
                            bool literal_eq9) {
    if (uploads.empty()) {
        throw std::invalid_argument("aggregate needs at least one upload");
    }
    const std::size_t k = uploads.front().sizes.size();
    const std::size_t d = uploads.front().centers.cols();
    AggregatedSummary agg{Matrix(k, d), std::vector<double>(k, 0.0), std::vector<std::size_t>(k, 0)};
    std::vector<double> denom(k, 0.0);

    for (const auto& up : uploads) {
        if (up.client_id == 0 || up.client_id > weights.size()) {
            throw std::out_of_range("upload from unknown client " + std::to_string(up.client_id));
        }
        const double w = weights[up.client_id - 1];
        for (std::size_t r = 0; r < k; ++r) {
            if (!up.has_center(r)) {
                continue;
            }
            const double o = static_cast<double>(up.sizes[r]);
            const double coef = w * o;
            auto b = agg.centers.row(r);
            const auto local = up.centers.row(r);
            for (std::size_t j = 0; j < d; ++j) {
                b[j] += coef * local[j];
            }
            agg.contributions[r] += coef * up.contributions[r];
            denom[r] += literal_eq9 ? o : coef;
            ++agg.support[r];
        }
    }
    for (std::size_t r = 0; r < k; ++r) {
        if (agg.support[r] == 0 || denom[r] <= 0.0) {
            continue;
        }
        for (double& v : agg.centers.row(r)) {
            v /= denom[r];
        }
        agg.contributions[r] /= denom[r];
    }
    return agg;
}

std::optional<ObjectiveValue> global_objective(const AggregatedSummary& agg, double dup_threshold,
                                               const HomogenizedSeeds& homogenized) {
    const double same2 = homogenized.radius * homogenized.radius;
    std::vector<std::size_t> live;
    for (std::size_t r = 0; r < agg.support.size(); ++r) {
        if (agg.support[r] > 0) {
            live.push_back(r);
        }
    }
    if (live.size() < 2) {
        return std::nullopt;
    }
    double sum = 0.0;
    for (std::size_t l : live) {
        double worst = 0.0;
        for (std::size_t r : live) {
            if (r == l) {
                continue;
            }
            const double sep = squared_distance(agg.centers.row(l), agg.centers.row(r));
            if (sep < dup_threshold) {
                continue;
            }
            if (homogenized.seeds != nullptr && homogenized.radius > 0.0 &&
                squared_distance(homogenized.seeds->row(l), homogenized.seeds->row(r)) <= same2) {
                continue;
            }
            worst = std::max(worst, (agg.contributions[l] + agg.contributions[r]) / sep);
        }
        sum += worst;
    }
    ObjectiveValue out;
    out.supported = live.size();
    out.value = sum / static_cast<double>(live.size());
    out.value_all_k = sum / static_cast<double>(agg.support.size());
    return out;
}

std::vector<std::size_t> cooperative_set(const Matrix& seeds, std::size_t r,
                                         std::span<const double> intensity, double weight, double eta) {
    double radius2 = 0.0;
    for (double v : intensity) {
        const double scaled = weight * v / eta;
        radius2 += scaled * scaled;
    }
    std::vector<std::size_t> members;
    const auto winner = seeds.row(r);
    for (std::size_t l = 0; l < seeds.rows(); ++l) {
        if (l == r || squared_distance(winner, seeds.row(l)) <= radius2) {
            members.push_back(l);
        }
    }
    return members;
}

void apply_seed_update(Matrix& seeds, std::span<const std::size_t> members,
                       std::span<const double> anchor, std::span<const double> intensity,
                       double weight, double eta) {
    const Point target(anchor.begin(), anchor.end());
    const double pull = weight * eta;
    for (std::size_t u : members) {
        auto m = seeds.row(u);
        for (std::size_t j = 0; j < m.size(); ++j) {
            m[j] += weight * intensity[j] + pull * (target[j] - m[j]);
        }
    }
}

SeedSet apply_seed_update(SeedSet seeds, std::span<const std::size_t> members, std::size_t r,
                          std::span<const double> intensity, double weight, double eta) {
    const Point anchor = seeds.seeds.row_copy(r);
    apply_seed_update(seeds.seeds, members, anchor, intensity, weight, eta);
    return seeds;
}

namespace {

void check_seed_bounds(const Matrix& seeds) {
    for (std::size_t r = 0; r < seeds.rows(); ++r) {
        for (double v : seeds.row(r)) {
            if (!std::isfinite(v) || v < -1.0 || v > 2.0) {
                throw std::logic_error("seed " + std::to_string(r) + " left the [-1, 2] box (value " +
                                       std::to_string(v) + ")");
            }
        }
    }
}

}  // namespace

RoundStats server_round(ServerState& state, std::vector<ClientUpload> uploads,
                        const ServerConfig& config) {
    if (uploads.empty()) {
        throw std::invalid_argument("server round needs at least one upload");
    }
    std::sort(uploads.begin(), uploads.end(),
              [](const ClientUpload& a, const ClientUpload& b) { return a.client_id < b.client_id; });

    for (const auto& up : uploads) {
        if (up.client_id == 0 || up.client_id > state.theta.size()) {
            throw std::out_of_range("upload from unknown client " + std::to_string(up.client_id));
        }
        if (up.sizes.size() != state.seeds.k()) {
            throw std::invalid_argument("upload seed count does not match server seeds");
        }
        ++state.theta[up.client_id - 1];
    }

    Matrix& seeds = state.seeds.seeds;
    const Matrix broadcast = seeds;
    const std::size_t k = seeds.rows();
    RoundStats stats;
    stats.per_seed_bound.assign(k, 0.0);

    Point anchor(seeds.cols());
    Point rebased(seeds.cols());
    for (const auto& up : uploads) {
        const double w = state.weights[up.client_id - 1];
        for (std::size_t r = 0; r < k; ++r) {
            for (const Point& uploaded : up.intensities.per_seed[r]) {
                const Point* vp = &uploaded;
                if (config.anchor == WinnerAnchor::rebased) {
                    const auto from = broadcast.row(r);
                    const auto now = seeds.row(r);
                    for (std::size_t j = 0; j < rebased.size(); ++j) {
                        rebased[j] = uploaded[j] + config.eta * (from[j] - now[j]);
                    }
                    vp = &rebased;
                }
                const Point& v = *vp;
                const auto members = cooperative_set(seeds, r, v, w, config.eta);
                const auto source = config.anchor == WinnerAnchor::broadcast ? broadcast.row(r) : seeds.row(r);
                std::copy(source.begin(), source.end(), anchor.begin());

                double step_v = 0.0;
                for (double c : v) {
                    step_v += c * c;
                }
                step_v = w * std::sqrt(step_v);
                for (std::size_t u : members) {
                    stats.per_seed_bound[u] += step_v + w * config.eta * euclidean_distance(anchor, seeds.row(u));
                }
                apply_seed_update(seeds, members, anchor, v, w, config.eta);
                ++stats.vectors;
            }
        }
    }
    if (config.check_bounds) {
        check_seed_bounds(seeds);
    }
    stats.displacement_bound = *std::max_element(stats.per_seed_bound.begin(), stats.per_seed_bound.end());

    for (auto& up : uploads) {
        up.intensities.per_seed.clear();
        state.latest[up.client_id - 1] = up;
    }
    std::vector<ClientUpload> known;
    if (config.objective_source == ServerConfig::ObjectiveSource::latest) {
        for (const auto& l : state.latest) {
            if (l) {
                known.push_back(*l);
            }
        }
    }
    const AggregatedSummary agg =
        aggregate(config.objective_source == ServerConfig::ObjectiveSource::latest ? known : uploads,
                  state.weights, config.literal_eq9);
    const auto z = global_objective(agg, config.dup_threshold, {&broadcast, config.homogenized_radius});
    std::size_t supported = 0;
    for (std::size_t s : agg.support) {
        supported += s > 0 ? 1 : 0;
    }
    state.supported.push_back(supported);
    if (z) {
        state.objective.push_back(z->value);
        state.objective_all.push_back(z->value_all_k);
    } else {
        stats.degenerate = true;
        // Degenerate round: carry the previous value forward.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        state.objective.push_back(state.objective.empty() ? nan : state.objective.back());
        state.objective_all.push_back(state.objective_all.empty() ? nan : state.objective_all.back());
    }

    if (config.balance) {
        state.weights = balance_weights(state.theta, config.xi);
    }
    ++state.iteration;
    return stats;
}

}  // namespace afcl
