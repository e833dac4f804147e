#include <cstdlib>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

#include "afcl/data.hpp"
#include "afcl/rng.hpp"
#include "support.hpp"

using afcl::test::TempDir;
using afcl::test::read_text;
using afcl::test::write_text;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result afcl_cmd(const TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = "cd '" + dir.path().string() + "' && '" AFCL_BIN "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(out);
    r.err = read_text(err);
    return r;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help for every subcommand") {
    TempDir dir;
    for (const char* sub : {"", "synth ", "partition ", "run ", "eval "}) {
        const Result r = afcl_cmd(dir, std::string(sub) + "--help");
        CHECK(r.code == 0);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
    CHECK(afcl_cmd(dir, "").code != 0);
    CHECK(afcl_cmd(dir, "frobnicate").code != 0);
}

TEST_CASE("synth writes the requested dataset") {
    TempDir dir;
    const Result r = afcl_cmd(dir, "synth --blobs 4 --n 2300 --d 2 --seed 7 -o sd1.csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("n=2300 d=2 k*=4") != std::string::npos);
    const afcl::DataMatrix m = afcl::load_csv(dir / "sd1.csv", {true, 2});
    CHECK(m.rows() == 2300);
    CHECK(m.cols() == 2);
    CHECK(std::set<int>(m.labels->begin(), m.labels->end()).size() == 4);

    REQUIRE(afcl_cmd(dir, "synth --blobs 5 --n 2900 --d 2 -o sd2.csv").code == 0);
    CHECK(afcl::load_csv(dir / "sd2.csv", {true, 2}).rows() == 2900);

    REQUIRE(afcl_cmd(dir, "synth --blobs 4 --n 2300 --d 2 --seed 7 -o again.csv").code == 0);
    CHECK(read_text(dir / "again.csv") == read_text(dir / "sd1.csv"));
}

TEST_CASE("synth without --blobs is a usage error") {
    TempDir dir;
    const Result r = afcl_cmd(dir, "synth --n 100 -o x.csv");
    CHECK(r.code != 0);
    CHECK_FALSE(std::filesystem::exists(dir / "x.csv"));
    CHECK(afcl_cmd(dir, "synth --blobs 3 -o /nonexistent/dir/x.csv").code != 0);
}

TEST_CASE("partition writes one file per client") {
    TempDir dir;
    REQUIRE(afcl_cmd(dir, "synth --blobs 3 --n 300 --seed 2 -o d.csv").code == 0);
    const Result r = afcl_cmd(dir, "partition --data d.csv --label-col 2 --clients 3 --seed 4 --out-dir parts");
    REQUIRE(r.code == 0);
    std::size_t total = 0;
    for (int g = 1; g <= 3; ++g) {
        const auto m = afcl::load_csv(dir / "parts" / ("client_" + std::to_string(g) + ".csv"), {true, 2});
        CHECK(m.cols() == 3);  // x0, x1, row
        total += m.rows();
    }
    CHECK(total == 300);
}

TEST_CASE("run writes per-trial files and a summary") {
    TempDir dir;
    REQUIRE(afcl_cmd(dir, "synth --blobs 4 --n 800 --seed 3 -o d.csv").code == 0);
    write_text(dir / "m.yaml",
               "seed: 11\ntrials: 3\noutput_dir: out\n"
               "dataset:\n  path: d.csv\n  label_column: 2\n"
               "partition:\n  clients: 3\n"
               "participation:\n  range: [0.2, 1.0]\n"
               "run:\n  k_star: 4\n");
    const Result r = afcl_cmd(dir, "run m.yaml");
    REQUIRE(r.code == 0);
    const auto summary = nlohmann::json::parse(r.out);
    CHECK(summary["trials"] == 3);
    CHECK(summary["silhouette"].contains("mean"));
    CHECK(summary["silhouette"].contains("std"));
    CHECK(nlohmann::json::parse(read_text(dir / "out" / "summary.json")) == summary);

    for (int t = 0; t < 3; ++t) {
        const std::string s = std::to_string(t);
        const auto rep = nlohmann::json::parse(read_text(dir / "out" / ("report_" + s + ".json")));
        std::istringstream obj(read_text(dir / "out" / ("objective_" + s + ".csv")));
        std::string header;
        std::getline(obj, header);
        CHECK(header == "iteration,Z,participant_ids");
        std::size_t lines = 0;
        for (std::string line; std::getline(obj, line);) ++lines;
        CHECK(lines == rep["iterations_run"].get<std::size_t>());
        std::istringstream traj(read_text(dir / "out" / ("trajectory_" + s + ".csv")));
        std::getline(traj, header);
        CHECK(header == "iteration,seed_id,dim_0,dim_1");
    }

    const std::string first = read_text(dir / "out" / "report_0.json");
    REQUIRE(afcl_cmd(dir, "run -q m.yaml --output-dir out2 --trials 1").code == 0);
    CHECK(read_text(dir / "out2" / "report_0.json") == first);
    CHECK_FALSE(std::filesystem::exists(dir / "out2" / "report_1.json"));
}

TEST_CASE("run reports bad manifests and missing data on stderr") {
    TempDir dir;
    write_text(dir / "missing.yaml", "dataset: {path: nowhere.csv}\n");
    Result r = afcl_cmd(dir, "run missing.yaml");
    CHECK(r.code != 0);
    CHECK(r.err.find("nowhere.csv") != std::string::npos);

    write_text(dir / "typo.yaml", "dataset: {path: d.csv}\nrun: {kzero: 4}\n");
    r = afcl_cmd(dir, "run typo.yaml");
    CHECK(r.code != 0);
    CHECK(r.err.find("run.kzero") != std::string::npos);

    CHECK(afcl_cmd(dir, "run no_such_manifest.yaml").code != 0);
}

TEST_CASE("eval scores a labelling") {
    TempDir dir;
    REQUIRE(afcl_cmd(dir, "synth --blobs 2 --n 400 --seed 5 -o d.csv").code == 0);
    const afcl::DataMatrix m = afcl::load_csv(dir / "d.csv", {true, 2});
    std::string truth = "label\n", shuffled, single, short_file;
    afcl::Rng rng(9);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        truth += std::to_string((*m.labels)[i]) + "\n";
        shuffled += std::to_string(afcl::uniform_index(rng, 2)) + "\n";
        single += "0\n";
        if (i + 1 < m.rows()) short_file += "1\n";
    }
    write_text(dir / "truth.csv", truth);
    write_text(dir / "shuffled.csv", shuffled);
    write_text(dir / "single.csv", single);
    write_text(dir / "short.csv", short_file);

    Result r = afcl_cmd(dir, "eval --data d.csv --label-col 2 --labels truth.csv");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["silhouette"].get<double>() > 0.9);
    CHECK(j["calinski_harabasz"].get<double>() > 1000.0);
    CHECK(j["k"] == 2);

    r = afcl_cmd(dir, "eval --data d.csv --label-col 2 --labels shuffled.csv");
    REQUIRE(r.code == 0);
    CHECK(std::abs(nlohmann::json::parse(r.out)["silhouette"].get<double>()) < 0.1);

    CHECK(afcl_cmd(dir, "eval --data d.csv --label-col 2 --labels short.csv").code != 0);
    CHECK(afcl_cmd(dir, "eval --data d.csv --label-col 2 --labels single.csv").code != 0);
}

TEST_CASE("eval reads a run report and agrees with it") {
    TempDir dir;
    REQUIRE(afcl_cmd(dir, "synth --blobs 3 --n 600 --seed 8 -o d.csv").code == 0);
    write_text(dir / "m.yaml",
               "seed: 2\ndataset: {path: d.csv, label_column: 2}\nparticipation: {probabilities: [1, 0.5, 0.5]}\n"
               "run: {k0: 5}\n");
    REQUIRE(afcl_cmd(dir, "run -q m.yaml").code == 0);
    const auto rep = nlohmann::json::parse(read_text(dir / "out" / "report_0.json"));
    REQUIRE(rep["learned_k"].get<int>() >= 2);
    const Result r = afcl_cmd(dir, "eval --data d.csv --label-col 2 --normalize --labels out/report_0.json");
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["silhouette"].get<double>() ==
          doctest::Approx(rep["silhouette"].get<double>()).epsilon(1e-9));
}

TEST_CASE("the bundled manifest runs") {
    TempDir dir;
    const Result r = afcl_cmd(dir, "run -q '" AFCL_TOOLS_DIR "/four_blobs.yaml' --output-dir out --trials 1");
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["trials"] == 1);
    CHECK(std::filesystem::exists(dir / "out" / "report_0.json"));
}

}
