#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "afcl/data.hpp"
#include "afcl/experiment.hpp"
#include "afcl/metrics.hpp"
#include "afcl/report.hpp"

namespace fs = std::filesystem;
using namespace afcl;

namespace {

struct SynthArgs {
    std::size_t blobs = 0;
    std::size_t n = 2300;
    std::size_t d = 2;
    double stddev = 0.02;
    double min_gap = 0.3;
    std::uint64_t seed = 0;
    fs::path out;
};

struct DataArgs {
    fs::path path;
    bool no_header = false;
    std::optional<std::size_t> label_col;

    DataMatrix load() const {
        return load_csv(path, CsvOptions{!no_header, label_col});
    }
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
    cmd->add_option("--data", a.path, "input CSV")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--no-header", a.no_header, "the CSV has no header line");
    cmd->add_option("--label-col", a.label_col, "0-based column holding labels (excluded from features)");
}

int cmd_synth(const SynthArgs& a) {
    if (a.blobs < 1 || a.d < 1 || a.n < a.blobs) {
        throw std::invalid_argument("need --blobs >= 1, --d >= 1 and --n >= --blobs");
    }
    if (!(a.stddev > 0.0)) {
        throw std::invalid_argument("--stddev must be positive");
    }
    const DataMatrix m = synth_gaussian(blob_spec(a.blobs, a.n, a.d, a.stddev, a.seed, a.min_gap));
    write_csv(a.out, m);
    std::cout << "n=" << m.rows() << " d=" << m.cols() << " k*=" << a.blobs << " -> " << a.out.string() << '\n';
    return 0;
}

int cmd_partition(const DataArgs& data, std::size_t clients, std::uint64_t seed, bool raw, const fs::path& dir) {
    DataMatrix m = data.load();
    if (!raw) {
        m = minmax_normalize(m);
    }
    const auto parts = partition_noniid(m, clients, seed);
    fs::create_directories(dir);
    for (const auto& c : parts) {
        const fs::path p = dir / ("client_" + std::to_string(c.client_id) + ".csv");
        write_client_csv(p, c);
        std::cout << "client " << c.client_id << ": " << c.size() << " rows -> " << p.string() << '\n';
    }
    return 0;
}

int cmd_run(const fs::path& manifest, const std::optional<fs::path>& out_dir, std::optional<std::size_t> trials,
            bool quiet) {
    ExperimentManifest m = load_manifest(manifest);
    if (out_dir) m.output_dir = *out_dir;
    if (trials) m.trials = *trials;
    const auto summary = run_experiment(m, quiet ? nullptr : &std::cerr);
    std::cout << summary.dump(2) << '\n';
    return 0;
}

// One integer per line with an optional header, or a run report whose
// assignment is mapped back to dataset row order.
std::vector<int> load_labels(const fs::path& path, std::size_t rows) {
    if (path.extension() == ".json") {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read " + path.string());
        const auto doc = nlohmann::json::parse(in);
        const auto assignment = doc.at("assignment").get<std::vector<int>>();
        const auto where = doc.at("rows").get<std::vector<std::size_t>>();
        if (assignment.size() != rows || where.size() != rows) {
            throw std::runtime_error("report covers " + std::to_string(assignment.size()) + " rows, dataset has " +
                                     std::to_string(rows));
        }
        std::vector<int> labels(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            if (where[i] >= rows) throw std::runtime_error("report row index out of range");
            labels[where[i]] = assignment[i];
        }
        return labels;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not an integer label");
        }
        labels.push_back(v);
    }
    if (labels.size() != rows) {
        throw std::runtime_error("label file has " + std::to_string(labels.size()) + " labels, dataset has " +
                                 std::to_string(rows) + " rows");
    }
    return labels;
}

int cmd_eval(const DataArgs& data, const fs::path& labels_path, bool normalize) {
    DataMatrix m = data.load();
    if (normalize) m = minmax_normalize(m);
    const auto labels = load_labels(labels_path, m.rows());
    const std::size_t k = distinct_label_count(labels);
    if (k < 2) {
        throw std::runtime_error("labels form a single cluster; SC and CH are undefined");
    }
    nlohmann::json out = {{"n", m.rows()}, {"k", k}, {"silhouette", silhouette(m.values, labels)}};
    if (k < m.rows()) {
        const double ch = calinski_harabasz(m.values, labels);
        out["calinski_harabasz"] = std::isfinite(ch) ? nlohmann::json(ch) : nlohmann::json("inf");
    } else {
        out["calinski_harabasz"] = nullptr;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous federated clustering with learned cluster count"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "write a Gaussian-blob dataset as CSV");
    s->add_option("--blobs", synth.blobs, "number of components")->required();
    s->add_option("--n", synth.n, "rows")->capture_default_str();
    s->add_option("--d", synth.d, "dimensions")->capture_default_str();
    s->add_option("--stddev", synth.stddev, "per-axis standard deviation")->capture_default_str();
    s->add_option("--min-gap", synth.min_gap, "minimum distance between centers")->capture_default_str();
    s->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
    s->add_option("-o,--out", synth.out, "output CSV")->required();

    DataArgs part_data;
    std::size_t clients = 3;
    std::uint64_t part_seed = 0;
    bool raw = false;
    fs::path part_dir;
    auto* p = app.add_subcommand("partition", "split a dataset into non-IID clients with k-means");
    add_data_options(p, part_data);
    p->add_option("--clients", clients, "number of clients")->capture_default_str();
    p->add_option("--seed", part_seed, "RNG seed")->capture_default_str();
    p->add_flag("--no-normalize", raw, "keep raw values instead of min-max scaling first");
    p->add_option("--out-dir", part_dir, "directory for client_<g>.csv")->required();

    fs::path manifest;
    std::optional<fs::path> out_dir;
    std::optional<std::size_t> trials;
    bool quiet = false;
    auto* r = app.add_subcommand("run", "run the trials described by a YAML manifest");
    r->add_option("manifest", manifest, "manifest file")->required()->check(CLI::ExistingFile);
    r->add_option("--output-dir", out_dir, "override output_dir");
    r->add_option("--trials", trials, "override trials");
    r->add_flag("-q,--quiet", quiet, "no per-trial progress on stderr");

    DataArgs eval_data;
    fs::path labels;
    bool normalize = false;
    auto* e = app.add_subcommand("eval", "print silhouette and Calinski-Harabasz for a labelling");
    add_data_options(e, eval_data);
    e->add_option("--labels", labels, "one label per line, or a report_<t>.json")->required()->check(CLI::ExistingFile);
    e->add_flag("--normalize", normalize, "min-max scale the data first (as run does)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err);
    }

    try {
        if (s->parsed()) return cmd_synth(synth);
        if (p->parsed()) return cmd_partition(part_data, clients, part_seed, raw, part_dir);
        if (r->parsed()) return cmd_run(manifest, out_dir, trials, quiet);
        if (e->parsed()) return cmd_eval(eval_data, labels, normalize);
    } catch (const std::exception& ex) {
        std::cerr << "afcl: error: " << ex.what() << '\n';
        return 1;
    }
    return 1;
}
