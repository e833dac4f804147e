#include "afcl/init.hpp"

#include <limits>
#include <stdexcept>
#include <string>

#include "afcl/rng.hpp"

namespace afcl {

std::vector<std::size_t> kmeanspp_indices(const Matrix& data, std::size_t k, std::uint64_t rng_seed) {
    const std::size_t n = data.rows();
    if (k < 1) {
        throw std::invalid_argument("k-means++ needs k >= 1");
    }
    if (k > n) {
        throw std::invalid_argument("k-means++ needs k <= n (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ")");
    }
    Rng rng(rng_seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::vector<bool> taken(n, false);

    chosen.push_back(uniform_index(rng, n));
    taken[chosen.back()] = true;

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (chosen.size() < k) {
        const auto last = data.row(chosen.back());
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d2 = squared_distance(data.row(i), last);
            if (d2 < nearest[i]) {
                nearest[i] = d2;
            }
            if (!taken[i]) {
                total += nearest[i];
            }
        }

        std::size_t pick = n;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i] || nearest[i] <= 0.0) {
                    continue;
                }
                acc += nearest[i];
                pick = i;
                if (acc > target) {
                    break;
                }
            }
        }
        if (pick == n) {
            // Every remaining row coincides with a chosen seed: fall back to a
            // uniform draw over the untaken rows.
            std::size_t remaining = 0;
            for (std::size_t i = 0; i < n; ++i) {
                remaining += taken[i] ? 0 : 1;
            }
            std::size_t skip = uniform_index(rng, remaining);
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) {
                    continue;
                }
                if (skip-- == 0) {
                    pick = i;
                    break;
                }
            }
        }
        chosen.push_back(pick);
        taken[pick] = true;
    }
    return chosen;
}

SeedSet kmeanspp_init(const Matrix& data, std::size_t k, std::uint64_t rng_seed) {
    SeedSet out;
    for (std::size_t idx : kmeanspp_indices(data, k, rng_seed)) {
        out.seeds.append_row(data.row(idx));
        out.ids.push_back(out.ids.size());
    }
    return out;
}

SeedSet server_pool_init(const std::vector<SeedSet>& client_seed_sets, std::size_t k,
                         std::uint64_t rng_seed) {
    Matrix pooled;
    for (const auto& set : client_seed_sets) {
        for (std::size_t r = 0; r < set.k(); ++r) {
            pooled.append_row(set.seeds.row(r));
        }
    }
    if (pooled.rows() < k) {
        throw std::invalid_argument("pooled client seeds (" + std::to_string(pooled.rows()) +
                                    ") fewer than k=" + std::to_string(k));
    }
    SeedSet out = kmeanspp_init(pooled, k, rng_seed);
    for (std::size_t r = 0; r < out.k(); ++r) {
        out.ids[r] = r + 1;
    }
    return out;
}

}  // namespace afcl
