#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"

#include "afcl/data.hpp"
#include "afcl/rng.hpp"
#include "support.hpp"

using namespace afcl;
using afcl::test::TempDir;
using afcl::test::write_text;

TEST_SUITE("data") {

TEST_CASE("load_csv keeps rows in file order") {
    TempDir dir;
    write_text(dir / "a.csv", "1,2\n3,4\n5,6\n");
    const DataMatrix m = load_csv(dir / "a.csv");
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 2);
    CHECK(m.values(0, 0) == 1.0);
    CHECK(m.values(1, 1) == 4.0);
    CHECK(m.values(2, 0) == 5.0);
    CHECK_FALSE(m.labels.has_value());
}

TEST_CASE("rows with a missing cell are dropped") {
    TempDir dir;
    write_text(dir / "a.csv", "x,y\n1,2\n3,\n5,6\nNA,1\n7,?\n");
    const DataMatrix m = load_csv(dir / "a.csv", {true, std::nullopt});
    REQUIRE(m.rows() == 2);
    CHECK(m.values(1, 0) == 5.0);
}

TEST_CASE("short rows are dropped too") {
    TempDir dir;
    write_text(dir / "a.csv", "1,2\n3\n5,6\n");
    CHECK(load_csv(dir / "a.csv").rows() == 2);
}

TEST_CASE("a non-numeric data cell is an error") {
    TempDir dir;
    write_text(dir / "a.csv", "1,2\nabc,4\n");
    CHECK_THROWS_WITH_AS(load_csv(dir / "a.csv"), doctest::Contains("non-numeric cell"), DataError);
}

TEST_CASE("no usable rows or no file is an error") {
    TempDir dir;
    write_text(dir / "a.csv", "x,y\n,\n");
    CHECK_THROWS_AS(load_csv(dir / "a.csv", {true, std::nullopt}), DataError);
    CHECK_THROWS_AS(load_csv(dir / "missing.csv"), DataError);
}

TEST_CASE("label column is split out") {
    TempDir dir;
    write_text(dir / "a.csv", "a,label,b\n0.5,2,1\n0.25,0,3\n");
    const DataMatrix m = load_csv(dir / "a.csv", {true, 1});
    REQUIRE(m.cols() == 2);
    REQUIRE(m.labels);
    CHECK(*m.labels == std::vector<int>{2, 0});
    CHECK(m.values(1, 1) == 3.0);
}

TEST_CASE("write_csv round-trips values exactly") {
    TempDir dir;
    DataMatrix m;
    m.values = Matrix{{0.1, 1.0 / 3.0}, {-2.5e-17, 12345.678901234567}};
    m.labels = std::vector<int>{4, 1};
    write_csv(dir / "m.csv", m);
    const DataMatrix back = load_csv(dir / "m.csv", {true, 2});
    CHECK(back.values == m.values);
    CHECK(*back.labels == *m.labels);
}

TEST_CASE("minmax_normalize") {
    DataMatrix m;
    m.values = Matrix{{0, 7, 0}, {5, 7, 1}, {10, 7, 0.5}};
    const DataMatrix n = minmax_normalize(m);
    CHECK(n.values(0, 0) == 0.0);
    CHECK(n.values(1, 0) == 0.5);
    CHECK(n.values(2, 0) == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(n.values(i, 1) == 0.0);
    CHECK(n.values(1, 2) == 1.0);
    CHECK(n.values(2, 2) == 0.5);

    SUBCASE("idempotent") {
        CHECK(minmax_normalize(n).values == n.values);
    }
}

TEST_CASE("normalized synthetic data stays in the unit box") {
    const DataMatrix n = minmax_normalize(synth_gaussian(blob_spec(5, 1000, 3, 0.05, 9)));
    for (double v : n.values.values()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("synth_gaussian shape, labels and determinism") {
    const SynthSpec spec = blob_spec(4, 2300, 2, 0.02, 7);
    CHECK(std::accumulate(spec.counts.begin(), spec.counts.end(), std::size_t{0}) == 2300);
    const DataMatrix a = synth_gaussian(spec);
    const DataMatrix b = synth_gaussian(spec);
    REQUIRE(a.rows() == 2300);
    REQUIRE(a.cols() == 2);
    CHECK(std::set<int>(a.labels->begin(), a.labels->end()).size() == 4);
    CHECK(a.values == b.values);
    CHECK(*a.labels == *b.labels);

    SynthSpec other = spec;
    other.rng_seed = 8;
    CHECK_FALSE(synth_gaussian(other).values == a.values);
}

TEST_CASE("tiny spread puts every row on its center") {
    SynthSpec spec{{{0.3, 0.6}}, {1e-12}, {50}, 1};
    const DataMatrix m = synth_gaussian(spec);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        CHECK(m.values(i, 0) == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(m.values(i, 1) == doctest::Approx(0.6).epsilon(1e-9));
    }
}

TEST_CASE("blob_spec keeps centers apart and inside the box") {
    const SynthSpec spec = blob_spec(5, 2900, 2, 0.02, 3);
    REQUIRE(spec.centers.size() == 5);
    for (std::size_t a = 0; a < 5; ++a) {
        for (double c : spec.centers[a]) {
            CHECK(c >= 0.1);
            CHECK(c <= 0.9);
        }
        for (std::size_t b = a + 1; b < 5; ++b) {
            CHECK(euclidean_distance(spec.centers[a], spec.centers[b]) >= 0.3);
        }
    }
}

TEST_CASE("blob_spec shrinks an impossible gap instead of looping") {
    const SynthSpec spec = blob_spec(30, 300, 1, 0.01, 3, 0.5);
    CHECK(spec.centers.size() == 30);
}

DataMatrix two_blobs_1d() {
    DataMatrix m;
    m.values = Matrix(100, 1);
    Rng rng(5);
    std::vector<int> labels;
    for (std::size_t i = 0; i < 100; ++i) {
        const double base = i % 2 ? 1.0 : 0.0;
        m.values(i, 0) = base + 0.02 * (uniform01(rng) - 0.5);
        labels.push_back(static_cast<int>(i % 2));
    }
    m.labels = labels;
    return m;
}

TEST_CASE("partition_noniid gives each blob its own client") {
    const auto clients = partition_noniid(two_blobs_1d(), 2, 11);
    REQUIRE(clients.size() == 2);
    for (const auto& c : clients) {
        CHECK(c.size() == 50);
        const std::set<int> labels(c.data.labels->begin(), c.data.labels->end());
        CHECK(labels.size() == 1);
    }
    CHECK(clients[0].client_id == 1);
    CHECK(clients[1].client_id == 2);
}

TEST_CASE("partition covers every row exactly once") {
    const DataMatrix m = synth_gaussian(blob_spec(4, 500, 2, 0.05, 2));
    for (std::size_t p : {1u, 3u, 5u}) {
        const auto clients = partition_noniid(m, p, 4);
        REQUIRE(clients.size() == p);
        std::vector<std::size_t> rows;
        for (const auto& c : clients) {
            CHECK(c.size() > 0);
            REQUIRE(c.global_rows.size() == c.size());
            for (std::size_t i = 0; i < c.size(); ++i) {
                const auto r = c.global_rows[i];
                CHECK(c.data.values.row_copy(i) == m.values.row_copy(r));
            }
            rows.insert(rows.end(), c.global_rows.begin(), c.global_rows.end());
        }
        std::sort(rows.begin(), rows.end());
        std::vector<std::size_t> all(m.rows());
        std::iota(all.begin(), all.end(), std::size_t{0});
        CHECK(rows == all);
    }
}

TEST_CASE("p = 1 and p = n") {
    DataMatrix m;
    m.values = Matrix{{0.0}, {0.3}, {0.6}, {1.0}};
    const auto one = partition_noniid(m, 1, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].data.values == m.values);

    const auto each = partition_noniid(m, 4, 1);
    REQUIRE(each.size() == 4);
    for (const auto& c : each) CHECK(c.size() == 1);

    CHECK_THROWS(partition_noniid(m, 5, 1));
    CHECK_THROWS(partition_noniid(m, 0, 1));
}

TEST_CASE("concat_clients follows client order") {
    const DataMatrix m = synth_gaussian(blob_spec(3, 90, 2, 0.05, 2));
    const auto clients = partition_noniid(m, 3, 4);
    const DataMatrix all = concat_clients(clients);
    REQUIRE(all.rows() == 90);
    std::size_t i = 0;
    for (const auto& c : clients) {
        for (std::size_t j = 0; j < c.size(); ++j, ++i) {
            CHECK(all.values.row_copy(i) == c.data.values.row_copy(j));
        }
    }
}

}
