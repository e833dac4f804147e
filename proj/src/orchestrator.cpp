#include "afcl/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "afcl/client.hpp"
#include "afcl/metrics.hpp"
#include "afcl/rng.hpp"

namespace afcl {

void ParticipationSchedule::validate() const {
    if (probs.empty()) {
        throw std::invalid_argument("participation schedule needs at least one client");
    }
    for (double p : probs) {
        if (!(p > 0.0) || p > 1.0) {
            throw std::invalid_argument("participation probabilities must lie in (0, 1]");
        }
    }
}

void RunConfig::validate() const {
    schedule.validate();
    if (k0 < 1) {
        throw std::invalid_argument("k0 must be at least 1");
    }
    if (!(xi > 0.0) || !(eta > 0.0)) {
        throw std::invalid_argument("xi and eta must be positive");
    }
    if (!(conv_rel_tol > 0.0) || conv_patience < 1) {
        throw std::invalid_argument("convergence tolerance and patience must be positive");
    }
    if (merge_radius && !(*merge_radius > 0.0)) {
        throw std::invalid_argument("merge radius must be positive");
    }
}

double RunConfig::merge_radius_for(std::size_t d) const {
    return merge_radius.value_or(0.01 * std::sqrt(static_cast<double>(d)));
}

ServerConfig RunConfig::server_config(std::size_t d) const {
    ServerConfig sc;
    sc.eta = eta;
    sc.xi = xi;
    sc.balance = balance;
    sc.literal_eq9 = literal_eq9;
    sc.dup_threshold = dup_threshold;
    sc.anchor = anchor;
    sc.objective_source = objective_source;
    sc.homogenized_radius = skip_homogenized_pairs ? merge_radius_for(d) : 0.0;
    sc.check_bounds = eta <= 1.0 && anchor != WinnerAnchor::current;
    return sc;
}

std::vector<double> ClusterReport::objective_history() const {
    std::vector<double> z;
    z.reserve(iterations.size());
    for (const auto& it : iterations) {
        z.push_back(it.objective);
    }
    return z;
}

std::vector<std::size_t> sample_participants(const ParticipationSchedule& schedule, std::size_t iteration) {
    Rng rng(derive_seed(schedule.rng_seed, streams::participation, iteration));
    constexpr int max_draws = 100;
    std::vector<std::size_t> ids;
    for (int draw = 0; draw < max_draws && ids.empty(); ++draw) {
        for (std::size_t g = 0; g < schedule.probs.size(); ++g) {
            if (uniform01(rng) < schedule.probs[g]) {
                ids.push_back(g + 1);
            }
        }
    }
    if (ids.empty()) {
        const auto best = std::max_element(schedule.probs.begin(), schedule.probs.end());
        ids.push_back(static_cast<std::size_t>(best - schedule.probs.begin()) + 1);
    }
    return ids;
}

bool check_convergence(const std::vector<double>& objective, double rel_tol, std::size_t patience,
                       std::optional<std::size_t> max_iter) {
    if (max_iter && objective.size() >= *max_iter) {
        return true;
    }
    if (patience == 0 || objective.size() < patience + 1) {
        return false;
    }
    constexpr double eps = 1e-12;
    for (std::size_t t = objective.size() - patience; t < objective.size(); ++t) {
        const double prev = objective[t - 1];
        const double cur = objective[t];
        if (!std::isfinite(prev) || !std::isfinite(cur)) {
            return false;
        }
        if (std::abs(cur - prev) / std::max(std::abs(prev), eps) >= rel_tol) {
            return false;
        }
    }
    return true;
}

MergeResult merge_seeds(const Matrix& seeds, double merge_radius) {
    if (!(merge_radius > 0.0)) {
        throw std::invalid_argument("merge radius must be positive");
    }
    const std::size_t k = seeds.rows();
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            if (euclidean_distance(seeds.row(a), seeds.row(b)) <= merge_radius) {
                const std::size_t ra = find(a);
                const std::size_t rb = find(b);
                if (ra != rb) {
                    parent[std::max(ra, rb)] = std::min(ra, rb);
                }
            }
        }
    }
    MergeResult out;
    out.seed_to_cluster.assign(k, 0);
    std::vector<std::size_t> group_of_root(k, k);
    std::vector<std::size_t> group_size;
    for (std::size_t r = 0; r < k; ++r) {
        const std::size_t root = find(r);
        if (group_of_root[root] == k) {
            group_of_root[root] = group_size.size();
            group_size.push_back(0);
        }
        out.seed_to_cluster[r] = group_of_root[root];
        ++group_size[group_of_root[root]];
    }
    out.centers = Matrix(group_size.size(), seeds.cols());
    for (std::size_t r = 0; r < k; ++r) {
        auto c = out.centers.row(out.seed_to_cluster[r]);
        const auto s = seeds.row(r);
        for (std::size_t j = 0; j < s.size(); ++j) {
            c[j] += s[j];
        }
    }
    for (std::size_t g = 0; g < group_size.size(); ++g) {
        for (double& v : out.centers.row(g)) {
            v /= static_cast<double>(group_size[g]);
        }
    }
    return out;
}

std::vector<int> final_assignment(const std::vector<ClientDataset>& clients, const Matrix& centers) {
    if (centers.empty()) {
        throw std::invalid_argument("final assignment needs at least one center");
    }
    std::vector<int> labels;
    for (const auto& c : clients) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto x = c.data.values.row(i);
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < centers.rows(); ++g) {
                const double d2 = squared_distance(x, centers.row(g));
                if (d2 < best_d) {
                    best_d = d2;
                    best = static_cast<int>(g);
                }
            }
            labels.push_back(best);
        }
    }
    return labels;
}

std::size_t draw_initial_k(std::size_t k_star, std::uint64_t rng_seed) {
    if (k_star < 1) {
        throw std::invalid_argument("k* must be at least 1");
    }
    Rng rng(rng_seed);
    return k_star + uniform_index(rng, k_star + 1);
}

SeedSet initialize_seeds(const std::vector<ClientDataset>& clients, std::size_t k0, std::uint64_t rng_seed) {
    std::vector<SeedSet> local;
    local.reserve(clients.size());
    for (const auto& c : clients) {
        // A client smaller than k0 contributes every row it has.
        const std::size_t k_local = std::min(k0, c.size());
        local.push_back(kmeanspp_init(c.data.values, k_local,
                                      derive_seed(rng_seed, streams::client_init, c.client_id)));
    }
    return server_pool_init(local, k0, derive_seed(rng_seed, streams::server_init));
}

namespace {

void finish_report(ClusterReport& report, const std::vector<ClientDataset>& clients, const RunConfig& config) {
    const std::size_t d = report.final_seeds.dim();
    MergeResult merged = merge_seeds(report.final_seeds.seeds, config.merge_radius_for(d));
    report.learned_k = merged.learned_k();
    report.seed_to_cluster = std::move(merged.seed_to_cluster);
    report.merged_centers = std::move(merged.centers);
    report.assignment = final_assignment(clients, report.merged_centers);
    for (const auto& c : clients) {
        report.global_rows.insert(report.global_rows.end(), c.global_rows.begin(), c.global_rows.end());
    }

    const std::size_t used = distinct_label_count(report.assignment);
    const DataMatrix all = concat_clients(clients);
    if (used >= 2) {
        report.silhouette = silhouette(all.values, report.assignment);
        if (used < all.rows()) {
            report.calinski_harabasz = calinski_harabasz(all.values, report.assignment);
        }
    }
}

}  // namespace

ClusterReport run_clients(const std::vector<ClientDataset>& clients, const RunConfig& config) {
    config.validate();
    if (clients.size() != config.schedule.probs.size()) {
        throw std::invalid_argument("schedule has " + std::to_string(config.schedule.probs.size()) +
                                    " probabilities for " + std::to_string(clients.size()) + " clients");
    }
    for (std::size_t g = 0; g < clients.size(); ++g) {
        if (clients[g].client_id != g + 1) {
            throw std::invalid_argument("clients must be numbered 1..p in order");
        }
    }

    ClusterReport report;
    report.initial_seeds = initialize_seeds(clients, config.k0, config.rng_seed);
    ServerState state = ServerState::initial(report.initial_seeds, clients.size());
    report.trajectories.push_back(state.seeds.seeds);

    const ServerConfig server_cfg = config.server_config(state.seeds.dim());
    ClientRoundOptions client_opts;
    client_opts.eta = config.eta;
    client_opts.shuffle = config.shuffle_rows;
    client_opts.gamma = config.gamma;

    for (std::size_t t = 1; t <= config.max_iter; ++t) {
        const auto started = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iteration = t;
        rec.participants = sample_participants(config.schedule, t);

        std::vector<ClientUpload> uploads;
        uploads.reserve(rec.participants.size());
        for (std::size_t id : rec.participants) {
            client_opts.shuffle_seed = derive_seed(config.rng_seed, streams::shuffle, id);
            uploads.push_back(client_round(clients[id - 1], state.seeds, t, client_opts));
        }
        const RoundStats stats = server_round(state, std::move(uploads), server_cfg);

        rec.objective = state.objective.back();
        rec.objective_all_k = state.objective_all.back();
        rec.supported = state.supported.back();
        rec.displacement_bound = stats.displacement_bound;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        report.iterations.push_back(std::move(rec));
        report.trajectories.push_back(state.seeds.seeds);
        report.iterations_run = t;

        if (check_convergence(state.objective, config.conv_rel_tol, config.conv_patience)) {
            report.converged = true;
            break;
        }
    }

    report.final_seeds = state.seeds;
    report.theta = state.theta;
    report.final_weights = state.weights;
    finish_report(report, clients, config);
    return report;
}

ClusterReport run(const DataMatrix& data, const RunConfig& config) {
    config.validate();
    const auto clients = partition_noniid(data, config.schedule.probs.size(),
                                          derive_seed(config.rng_seed, streams::partition));
    return run_clients(clients, config);
}

}  // namespace afcl
