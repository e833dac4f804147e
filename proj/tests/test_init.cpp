#include <algorithm>
#include <set>

#include "doctest.h"

#include "afcl/data.hpp"
#include "afcl/init.hpp"
#include "afcl/rng.hpp"

using namespace afcl;

namespace {

bool is_row_of(std::span<const double> p, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        if (std::equal(p.begin(), p.end(), r.begin(), r.end())) return true;
    }
    return false;
}

Matrix grid(std::size_t n) {
    Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, 0) = static_cast<double>(i % 4);
        m(i, 1) = static_cast<double>(i / 4);
    }
    return m;
}

}  // namespace

TEST_SUITE("init") {

TEST_CASE("single point") {
    const SeedSet s = kmeanspp_init(Matrix{{0.25, 0.75}}, 1, 3);
    REQUIRE(s.k() == 1);
    CHECK(s.seeds.row_copy(0) == Point{0.25, 0.75});
}

TEST_CASE("k = n picks every point once") {
    const Matrix m = grid(12);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto idx = kmeanspp_indices(m, 12, seed);
        std::sort(idx.begin(), idx.end());
        for (std::size_t i = 0; i < 12; ++i) CHECK(idx[i] == i);
    }
}

TEST_CASE("k = n with duplicate rows still returns distinct rows") {
    const Matrix m{{0.0}, {0.0}, {1.0}};
    auto idx = kmeanspp_indices(m, 3, 1);
    std::sort(idx.begin(), idx.end());
    CHECK(idx == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("two far blobs are both seeded") {
    DataMatrix d = synth_gaussian(SynthSpec{{{0.0, 0.0}, {10.0, 10.0}}, {0.1, 0.1}, {50, 50}, 4});
    int both = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        const SeedSet s = kmeanspp_init(d.values, 2, derive_seed(77, 0, t));
        const bool a = s.seeds(0, 0) < 5.0;
        const bool b = s.seeds(1, 0) < 5.0;
        both += a != b;
    }
    CHECK(both >= 990);
}

TEST_CASE("seeds are input rows and reproducible") {
    const Matrix m = synth_gaussian(blob_spec(3, 300, 3, 0.05, 1)).values;
    const SeedSet a = kmeanspp_init(m, 7, 42);
    const SeedSet b = kmeanspp_init(m, 7, 42);
    CHECK(a.seeds == b.seeds);
    CHECK(a.ids == b.ids);
    for (std::size_t r = 0; r < a.k(); ++r) CHECK(is_row_of(a.seeds.row(r), m));
    CHECK(std::set<std::size_t>(a.ids.begin(), a.ids.end()).size() == 7);
}

TEST_CASE("invalid k") {
    const Matrix m = grid(4);
    CHECK_THROWS(kmeanspp_init(m, 0, 1));
    CHECK_THROWS(kmeanspp_init(m, 5, 1));
}

TEST_CASE("server pool of exactly k seeds is a permutation") {
    const SeedSet client = kmeanspp_init(grid(8), 5, 2);
    const SeedSet global = server_pool_init({client}, 5, 9);
    REQUIRE(global.k() == 5);
    std::vector<Point> a, b;
    for (std::size_t r = 0; r < 5; ++r) {
        a.push_back(client.seeds.row_copy(r));
        b.push_back(global.seeds.row_copy(r));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("identical client pools draw from the shared points") {
    const SeedSet client = kmeanspp_init(grid(12), 4, 2);
    const SeedSet global = server_pool_init({client, client, client}, 4, 5);
    for (std::size_t r = 0; r < global.k(); ++r) CHECK(is_row_of(global.seeds.row(r), client.seeds));
}

TEST_CASE("three clients of eight seeds give eight pooled members with ids 1..8") {
    const Matrix data = synth_gaussian(blob_spec(4, 600, 2, 0.03, 8)).values;
    Matrix pooled(0, 2);
    std::vector<SeedSet> clients;
    for (std::uint64_t g = 0; g < 3; ++g) {
        clients.push_back(kmeanspp_init(data, 8, g));
        for (std::size_t r = 0; r < 8; ++r) pooled.append_row(clients.back().seeds.row(r));
    }
    const SeedSet global = server_pool_init(clients, 8, 3);
    REQUIRE(global.k() == 8);
    for (std::size_t r = 0; r < 8; ++r) {
        CHECK(is_row_of(global.seeds.row(r), pooled));
        CHECK(global.ids[r] == r + 1);
    }
}

TEST_CASE("pool smaller than k") {
    const SeedSet client = kmeanspp_init(grid(4), 2, 1);
    CHECK_THROWS(server_pool_init({client}, 3, 1));
}

}
