#pragma once

#include <cstdint>
#include <vector>

#include "afcl/matrix.hpp"

namespace afcl {

// k x d seed matrix. Ids are assigned once and travel with the seed for the
// whole run; seeds are updated in place and never reindexed.
struct SeedSet {
    Matrix seeds;
    std::vector<std::size_t> ids;

    std::size_t k() const noexcept { return seeds.rows(); }
    std::size_t dim() const noexcept { return seeds.cols(); }
};

// Standard k-means++ seeding (no Lloyd refinement). Ids are 0..k-1 in
// selection order.
SeedSet kmeanspp_init(const Matrix& data, std::size_t k, std::uint64_t rng_seed);

// Row indices chosen by k-means++, in selection order.
std::vector<std::size_t> kmeanspp_indices(const Matrix& data, std::size_t k, std::uint64_t rng_seed);

// Pools every client seed into one dataset and seeds k global seeds from it.
// Global ids are 1..k.
SeedSet server_pool_init(const std::vector<SeedSet>& client_seed_sets, std::size_t k,
                         std::uint64_t rng_seed);

}  // namespace afcl
