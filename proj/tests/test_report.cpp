#include <cmath>
#include <sstream>

#include "doctest.h"

#include "afcl/data.hpp"
#include "afcl/report.hpp"
#include "support.hpp"

using namespace afcl;

namespace {

ClusterReport small_report() {
    ClusterReport r;
    r.initial_seeds.seeds = Matrix{{0.0, 0.0}, {1.0, 1.0}};
    r.initial_seeds.ids = {1, 2};
    r.final_seeds = r.initial_seeds;
    r.trajectories = {r.initial_seeds.seeds, Matrix{{0.25, 0.0}, {1.0, 0.5}}};
    IterationRecord it;
    it.iteration = 1;
    it.objective = std::nan("");
    it.objective_all_k = std::nan("");
    it.participants = {1, 3};
    r.iterations = {it};
    r.iterations_run = 1;
    r.learned_k = 2;
    r.merged_centers = r.initial_seeds.seeds;
    r.seed_to_cluster = {0, 1};
    r.assignment = {0, 1, 1};
    r.global_rows = {2, 0, 1};
    r.silhouette = 0.5;
    return r;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("objective trace") {
    ClusterReport r = small_report();
    IterationRecord second = r.iterations[0];
    second.iteration = 2;
    second.objective = 0.125;
    second.participants = {2};
    r.iterations.push_back(second);
    std::ostringstream out;
    write_objective_csv(out, r);
    CHECK(out.str() == "iteration,Z,participant_ids\n1,,1;3\n2,0.125,2\n");
}

TEST_CASE("trajectory trace starts at the initialization") {
    std::ostringstream out;
    write_trajectory_csv(out, small_report());
    CHECK(out.str() ==
          "iteration,seed_id,dim_0,dim_1\n"
          "0,1,0,0\n0,2,1,1\n"
          "1,1,0.25,0\n1,2,1,0.5\n");
}

TEST_CASE("report json") {
    const auto j = report_to_json(small_report());
    CHECK(j["learned_k"] == 2);
    CHECK(j["silhouette"] == 0.5);
    CHECK(j["calinski_harabasz"].is_null());
    CHECK(j["iterations"][0]["objective"].is_null());
    CHECK(j["iterations"][0]["participants"] == nlohmann::json::array({1, 3}));
    CHECK(j["rows"] == nlohmann::json::array({2, 0, 1}));
    CHECK(j["final_seeds"]["ids"] == nlohmann::json::array({1, 2}));
    CHECK_FALSE(j.contains("seconds"));
}

TEST_CASE("describe") {
    const Stat s = describe({1.0, 2.0, 3.0, std::nan(""), INFINITY});
    CHECK(s.count == 3);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.std == doctest::Approx(1.0));
    CHECK(describe({4.0}).std == 0.0);
    CHECK(std::isnan(describe({}).mean));
}

TEST_CASE("summary over trials") {
    ClusterReport a = small_report(), b = small_report();
    b.learned_k = 4;
    b.silhouette.reset();
    b.converged = true;
    const auto s = summarize({a, b});
    CHECK(s["trials"] == 2);
    CHECK(s["converged"] == 1);
    CHECK(s["learned_k"]["mean"] == 3.0);
    CHECK(s["silhouette"]["count"] == 1);
    CHECK(s["calinski_harabasz"]["mean"].is_null());
}

TEST_CASE("trial files") {
    afcl::test::TempDir dir;
    write_trial_files(dir.path(), 3, small_report(), {{"trial", 3}});
    CHECK(std::filesystem::exists(dir / "report_3.json"));
    CHECK(std::filesystem::exists(dir / "trajectory_3.csv"));
    CHECK(std::filesystem::exists(dir / "objective_3.csv"));
    const auto j = nlohmann::json::parse(afcl::test::read_text(dir / "report_3.json"));
    CHECK(j["trial"] == 3);
    CHECK(j["learned_k"] == 2);
}

}
