#include "afcl/experiment.hpp"

#include <filesystem>

#include "afcl/report.hpp"

namespace afcl {

nlohmann::json config_to_json(const RunConfig& c) {
    return {
        {"k0", c.k0},
        {"xi", c.xi},
        {"eta", c.eta},
        {"max_iter", c.max_iter},
        {"tolerance", c.conv_rel_tol},
        {"patience", c.conv_patience},
        {"merge_radius", c.merge_radius ? nlohmann::json(*c.merge_radius) : nlohmann::json(nullptr)},
        {"balance", c.balance},
        {"aggregation", c.literal_eq9 ? "count" : "normalized"},
        {"anchor", to_string(c.anchor)},
        {"gamma", to_string(c.gamma)},
        {"objective", to_string(c.objective_source)},
        {"shuffle_rows", c.shuffle_rows},
        {"duplicate_threshold", c.dup_threshold},
        {"skip_homogenized_pairs", c.skip_homogenized_pairs},
        {"probabilities", c.schedule.probs},
    };
}

nlohmann::json run_experiment(const ExperimentManifest& m, std::ostream* log) {
    m.validate();
    const bool per_trial = m.dataset.synth && m.dataset.synth->per_trial;
    DataMatrix shared;
    if (!per_trial) shared = load_dataset(m);
    std::filesystem::create_directories(m.output_dir);

    std::vector<ClusterReport> reports;
    for (std::size_t t = 0; t < m.trials; ++t) {
        const TrialPlan plan = plan_trial(m, t);
        const DataMatrix fresh = per_trial ? load_dataset(m, &plan) : DataMatrix{};
        const auto clients = partition_noniid(per_trial ? fresh : shared, m.clients, plan.partition_seed);
        ClusterReport report = run_clients(clients, plan.config);
        nlohmann::json extra = {
            {"trial", t},
            {"seed", plan.seed},
            {"partition_seed", plan.partition_seed},
            {"data_seed", per_trial ? nlohmann::json(plan.data_seed) : nlohmann::json(nullptr)},
            {"config", config_to_json(plan.config)},
        };
        write_trial_files(m.output_dir, t, report, extra);
        if (log) {
            *log << "trial " << t << ": learned_k=" << report.learned_k << " iterations=" << report.iterations_run
                 << (report.converged ? "" : " (not converged)") << " SC="
                 << (report.silhouette ? format_real(*report.silhouette) : std::string("undefined")) << '\n';
        }
        reports.push_back(std::move(report));
    }
    nlohmann::json summary = summarize(reports);
    write_json(m.output_dir / "summary.json", summary);
    return summary;
}

}  // namespace afcl
