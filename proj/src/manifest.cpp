#include "afcl/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "afcl/rng.hpp"

namespace afcl {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
    if (!node.IsMap()) {
        throw ManifestError((where.empty() ? std::string("manifest") : where) + ": expected a mapping");
    }
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) {
            throw ManifestError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
        }
    }
}

std::string join(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

template <class T>
T scalar(const YAML::Node& node, const std::string& path, const char* what) {
    if (!node.IsScalar()) {
        throw ManifestError(path + ": expected " + what);
    }
    try {
        return node.as<T>();
    } catch (const YAML::BadConversion&) {
        throw ManifestError(path + ": expected " + what + ", got '" + node.Scalar() + "'");
    }
}

std::uint64_t unsigned_value(const YAML::Node& node, const std::string& path) {
    if (node.IsScalar() && !node.Scalar().empty() && node.Scalar().front() == '-') {
        throw ManifestError(path + ": must not be negative");
    }
    return scalar<std::uint64_t>(node, path, "a non-negative integer");
}

double real_value(const YAML::Node& node, const std::string& path) {
    return scalar<double>(node, path, "a number");
}

bool bool_value(const YAML::Node& node, const std::string& path) {
    return scalar<bool>(node, path, "true or false");
}

std::string string_value(const YAML::Node& node, const std::string& path) {
    return scalar<std::string>(node, path, "a string");
}

template <class E>
E choice(const YAML::Node& node, const std::string& path, const std::vector<std::pair<std::string, E>>& options) {
    const std::string s = string_value(node, path);
    for (const auto& [name, value] : options) {
        if (s == name) {
            return value;
        }
    }
    std::string names;
    for (const auto& [name, value] : options) {
        names += (names.empty() ? "" : ", ") + name;
    }
    throw ManifestError(path + ": '" + s + "' is not one of " + names);
}

const std::vector<std::pair<std::string, WinnerAnchor>> anchor_names = {
    {"broadcast", WinnerAnchor::broadcast}, {"rebased", WinnerAnchor::rebased}, {"current", WinnerAnchor::current}};
const std::vector<std::pair<std::string, GammaMode>> gamma_names = {
    {"frozen", GammaMode::frozen}, {"online", GammaMode::online}};
const std::vector<std::pair<std::string, ServerConfig::ObjectiveSource>> objective_names = {
    {"latest", ServerConfig::ObjectiveSource::latest},
    {"participants", ServerConfig::ObjectiveSource::participants}};
const std::vector<std::pair<std::string, bool>> aggregation_names = {{"normalized", false}, {"count", true}};

void parse_dataset(const YAML::Node& node, ExperimentManifest& m, const std::filesystem::path& base_dir) {
    const std::string where = "dataset";
    check_keys(node, where, {"path", "synth", "header", "label_column", "normalize"});
    DatasetSource& ds = m.dataset;
    if (node["path"]) {
        std::filesystem::path p = string_value(node["path"], join(where, "path"));
        ds.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (const auto s = node["synth"]) {
        const std::string sw = join(where, "synth");
        check_keys(s, sw, {"blobs", "n", "d", "stddev", "min_gap", "seed", "per_trial"});
        SynthSource synth;
        if (s["blobs"]) synth.blobs = unsigned_value(s["blobs"], join(sw, "blobs"));
        if (s["n"]) synth.n = unsigned_value(s["n"], join(sw, "n"));
        if (s["d"]) synth.d = unsigned_value(s["d"], join(sw, "d"));
        if (s["stddev"]) synth.stddev = real_value(s["stddev"], join(sw, "stddev"));
        if (s["min_gap"]) synth.min_gap = real_value(s["min_gap"], join(sw, "min_gap"));
        if (s["seed"]) synth.seed = unsigned_value(s["seed"], join(sw, "seed"));
        if (s["per_trial"]) synth.per_trial = bool_value(s["per_trial"], join(sw, "per_trial"));
        ds.synth = synth;
    }
    if (node["header"]) ds.has_header = bool_value(node["header"], join(where, "header"));
    if (node["label_column"]) ds.label_column = unsigned_value(node["label_column"], join(where, "label_column"));
    if (node["normalize"]) ds.normalize = bool_value(node["normalize"], join(where, "normalize"));
}

void parse_participation(const YAML::Node& node, ExperimentManifest& m) {
    const std::string where = "participation";
    check_keys(node, where, {"probabilities", "range"});
    if (node["probabilities"] && node["range"]) {
        throw ManifestError("participation: give either probabilities or range, not both");
    }
    if (const auto p = node["probabilities"]) {
        if (!p.IsSequence()) {
            throw ManifestError("participation.probabilities: expected a list");
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            m.participation.probabilities.push_back(
                real_value(p[i], "participation.probabilities[" + std::to_string(i) + "]"));
        }
    }
    if (const auto r = node["range"]) {
        if (!r.IsSequence() || r.size() != 2) {
            throw ManifestError("participation.range: expected [low, high]");
        }
        m.participation.low = real_value(r[0], "participation.range[0]");
        m.participation.high = real_value(r[1], "participation.range[1]");
    }
}

void parse_run(const YAML::Node& node, ExperimentManifest& m) {
    const std::string w = "run";
    check_keys(node, w,
               {"k0", "k_star", "xi", "eta", "max_iter", "tolerance", "patience", "merge_radius", "balance",
                "aggregation", "anchor", "gamma", "objective", "shuffle_rows", "duplicate_threshold",
                "skip_homogenized_pairs"});
    RunConfig& c = m.run;
    if (node["k0"] && node["k_star"]) {
        throw ManifestError("run: give either k0 or k_star, not both");
    }
    if (node["k0"]) c.k0 = unsigned_value(node["k0"], join(w, "k0"));
    if (node["k_star"]) m.k_star = unsigned_value(node["k_star"], join(w, "k_star"));
    if (node["xi"]) c.xi = real_value(node["xi"], join(w, "xi"));
    if (node["eta"]) c.eta = real_value(node["eta"], join(w, "eta"));
    if (node["max_iter"]) c.max_iter = unsigned_value(node["max_iter"], join(w, "max_iter"));
    if (node["tolerance"]) c.conv_rel_tol = real_value(node["tolerance"], join(w, "tolerance"));
    if (node["patience"]) c.conv_patience = unsigned_value(node["patience"], join(w, "patience"));
    if (node["merge_radius"]) c.merge_radius = real_value(node["merge_radius"], join(w, "merge_radius"));
    if (node["balance"]) c.balance = bool_value(node["balance"], join(w, "balance"));
    if (node["aggregation"]) c.literal_eq9 = choice(node["aggregation"], join(w, "aggregation"), aggregation_names);
    if (node["anchor"]) c.anchor = choice(node["anchor"], join(w, "anchor"), anchor_names);
    if (node["gamma"]) c.gamma = choice(node["gamma"], join(w, "gamma"), gamma_names);
    if (node["objective"]) c.objective_source = choice(node["objective"], join(w, "objective"), objective_names);
    if (node["shuffle_rows"]) c.shuffle_rows = bool_value(node["shuffle_rows"], join(w, "shuffle_rows"));
    if (node["duplicate_threshold"]) {
        c.dup_threshold = real_value(node["duplicate_threshold"], join(w, "duplicate_threshold"));
    }
    if (node["skip_homogenized_pairs"]) {
        c.skip_homogenized_pairs = bool_value(node["skip_homogenized_pairs"], join(w, "skip_homogenized_pairs"));
    }
}

template <class E>
std::string name_of(E value, const std::vector<std::pair<std::string, E>>& options) {
    for (const auto& [name, v] : options) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

}  // namespace

std::string to_string(WinnerAnchor a) { return name_of(a, anchor_names); }
std::string to_string(GammaMode g) { return name_of(g, gamma_names); }
std::string to_string(ServerConfig::ObjectiveSource s) { return name_of(s, objective_names); }

void ExperimentManifest::validate() const {
    if (trials < 1) {
        throw ManifestError("trials must be at least 1");
    }
    if (clients < 1) {
        throw ManifestError("partition.clients must be at least 1");
    }
    if (dataset.path.has_value() == dataset.synth.has_value()) {
        throw ManifestError("dataset: give exactly one of path or synth");
    }
    if (dataset.synth) {
        const SynthSource& s = *dataset.synth;
        if (s.blobs < 1 || s.d < 1 || s.n < s.blobs) {
            throw ManifestError("dataset.synth: need blobs >= 1, d >= 1 and n >= blobs");
        }
        if (!(s.stddev > 0.0) || !(s.min_gap >= 0.0)) {
            throw ManifestError("dataset.synth: stddev must be positive and min_gap non-negative");
        }
        if (s.per_trial && s.seed) {
            throw ManifestError("dataset.synth: seed and per_trial are mutually exclusive");
        }
    }
    const auto& probs = participation.probabilities;
    if (!probs.empty()) {
        if (probs.size() != clients) {
            throw ManifestError("participation.probabilities has " + std::to_string(probs.size()) +
                                " entries for " + std::to_string(clients) + " clients");
        }
        for (double p : probs) {
            if (!(p > 0.0) || p > 1.0) {
                throw ManifestError("participation probabilities must lie in (0, 1]");
            }
        }
    } else if (!(participation.low > 0.0) || participation.high > 1.0 || participation.low > participation.high) {
        throw ManifestError("participation.range must satisfy 0 < low <= high <= 1");
    }
    if (k_star && *k_star < 1) {
        throw ManifestError("run.k_star must be at least 1");
    }
    RunConfig probe = run;
    probe.schedule.probs.assign(clients, 1.0);
    try {
        probe.validate();
    } catch (const std::invalid_argument& e) {
        throw ManifestError(std::string("run: ") + e.what());
    }
}

ExperimentManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ManifestError(std::string("malformed manifest: ") + e.what());
    }
    check_keys(root, "", {"seed", "trials", "output_dir", "dataset", "partition", "participation", "run"});
    ExperimentManifest m;
    if (root["seed"]) m.seed = unsigned_value(root["seed"], "seed");
    if (root["trials"]) m.trials = unsigned_value(root["trials"], "trials");
    if (root["output_dir"]) {
        std::filesystem::path p = string_value(root["output_dir"], "output_dir");
        m.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else if (!base_dir.empty()) {
        m.output_dir = base_dir / m.output_dir;
    }
    if (!root["dataset"]) {
        throw ManifestError("missing required section 'dataset'");
    }
    parse_dataset(root["dataset"], m, base_dir);
    if (const auto p = root["partition"]) {
        check_keys(p, "partition", {"clients", "seed"});
        if (p["clients"]) m.clients = unsigned_value(p["clients"], "partition.clients");
        if (p["seed"]) m.partition_seed = unsigned_value(p["seed"], "partition.seed");
    }
    if (root["participation"]) parse_participation(root["participation"], m);
    if (root["run"]) parse_run(root["run"], m);
    m.validate();
    return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ManifestError("cannot read manifest " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_manifest(text.str(), path.parent_path());
}

DataMatrix load_dataset(const ExperimentManifest& m, const TrialPlan* plan) {
    DataMatrix data;
    if (m.dataset.synth) {
        const SynthSource& s = *m.dataset.synth;
        if (s.per_trial && !plan) throw ManifestError("dataset.synth.per_trial: data depends on the trial");
        const std::uint64_t seed = s.per_trial ? plan->data_seed : s.seed.value_or(m.seed);
        data = synth_gaussian(blob_spec(s.blobs, s.n, s.d, s.stddev, seed, s.min_gap));
    } else {
        data = load_csv(*m.dataset.path, CsvOptions{m.dataset.has_header, m.dataset.label_column});
    }
    return m.dataset.normalize ? minmax_normalize(data) : data;
}

TrialPlan plan_trial(const ExperimentManifest& m, std::size_t trial) {
    TrialPlan plan;
    plan.seed = derive_seed(m.seed, streams::trial, trial);
    plan.partition_seed = m.partition_seed.value_or(derive_seed(plan.seed, streams::partition));
    plan.data_seed = derive_seed(plan.seed, streams::experiment, 2);
    plan.config = m.run;
    plan.config.rng_seed = plan.seed;
    plan.config.schedule.rng_seed = plan.seed;
    if (m.k_star) {
        plan.config.k0 = draw_initial_k(*m.k_star, derive_seed(plan.seed, streams::experiment, 0));
    }
    if (!m.participation.probabilities.empty()) {
        plan.config.schedule.probs = m.participation.probabilities;
    } else {
        Rng rng(derive_seed(plan.seed, streams::experiment, 1));
        const double lo = m.participation.low;
        const double hi = m.participation.high;
        for (std::size_t g = 0; g < m.clients; ++g) {
            plan.config.schedule.probs.push_back(lo + (hi - lo) * uniform01(rng));
        }
    }
    return plan;
}

}  // namespace afcl
