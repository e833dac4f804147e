#include "afcl/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "afcl/data.hpp"

namespace afcl {

namespace {

using nlohmann::json;

json real(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

json real(const std::optional<double>& v) {
    return v ? real(*v) : json(nullptr);
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (double v : m.row(i)) {
            row.push_back(real(v));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

json seeds_json(const SeedSet& s) {
    return {{"ids", s.ids}, {"seeds", matrix_json(s.seeds)}};
}

std::string cell(double v) {
    return std::isfinite(v) ? format_real(v) : std::string();
}

}  // namespace

json report_to_json(const ClusterReport& report) {
    json iterations = json::array();
    for (const auto& it : report.iterations) {
        iterations.push_back({
            {"iteration", it.iteration},
            {"objective", real(it.objective)},
            {"objective_all_k", real(it.objective_all_k)},
            {"supported", it.supported},
            {"participants", it.participants},
            {"displacement_bound", real(it.displacement_bound)},
        });
    }
    json weights = json::array();
    for (double w : report.final_weights) {
        weights.push_back(real(w));
    }
    return {
        {"learned_k", report.learned_k},
        {"silhouette", real(report.silhouette)},
        {"calinski_harabasz", real(report.calinski_harabasz)},
        {"converged", report.converged},
        {"iterations_run", report.iterations_run},
        {"initial_seeds", seeds_json(report.initial_seeds)},
        {"final_seeds", seeds_json(report.final_seeds)},
        {"merged_centers", matrix_json(report.merged_centers)},
        {"seed_to_cluster", report.seed_to_cluster},
        {"theta", report.theta},
        {"final_weights", weights},
        {"iterations", iterations},
        {"assignment", report.assignment},
        {"rows", report.global_rows},
    };
}

void write_trajectory_csv(std::ostream& out, const ClusterReport& report) {
    const std::size_t d = report.initial_seeds.dim();
    out << "iteration,seed_id";
    for (std::size_t j = 0; j < d; ++j) {
        out << ",dim_" << j;
    }
    out << '\n';
    const auto& ids = report.initial_seeds.ids;
    for (std::size_t t = 0; t < report.trajectories.size(); ++t) {
        const Matrix& m = report.trajectories[t];
        for (std::size_t r = 0; r < m.rows(); ++r) {
            out << t << ',' << ids[r];
            for (double v : m.row(r)) {
                out << ',' << cell(v);
            }
            out << '\n';
        }
    }
}

void write_objective_csv(std::ostream& out, const ClusterReport& report) {
    out << "iteration,Z,participant_ids\n";
    for (const auto& it : report.iterations) {
        out << it.iteration << ',' << cell(it.objective) << ',';
        for (std::size_t i = 0; i < it.participants.size(); ++i) {
            out << (i ? ";" : "") << it.participants[i];
        }
        out << '\n';
    }
}

Stat describe(const std::vector<double>& values) {
    Stat s;
    double sum = 0.0;
    for (double v : values) {
        if (std::isfinite(v)) {
            sum += v;
            ++s.count;
        }
    }
    if (s.count == 0) {
        s.mean = std::nan("");
        s.std = std::nan("");
        return s;
    }
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) {
            if (std::isfinite(v)) {
                ss += (v - s.mean) * (v - s.mean);
            }
        }
        s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    return s;
}

json summarize(const std::vector<ClusterReport>& reports) {
    std::vector<double> sc, ch, k, iters;
    std::size_t converged = 0;
    for (const auto& r : reports) {
        sc.push_back(r.silhouette.value_or(std::nan("")));
        ch.push_back(r.calinski_harabasz.value_or(std::nan("")));
        k.push_back(static_cast<double>(r.learned_k));
        iters.push_back(static_cast<double>(r.iterations_run));
        converged += r.converged;
    }
    auto entry = [](const std::vector<double>& v) {
        const Stat s = describe(v);
        return json{{"mean", real(s.mean)}, {"std", real(s.std)}, {"count", s.count}};
    };
    return {
        {"trials", reports.size()},
        {"converged", converged},
        {"silhouette", entry(sc)},
        {"calinski_harabasz", entry(ch)},
        {"learned_k", entry(k)},
        {"iterations", entry(iters)},
    };
}

void write_json(const std::filesystem::path& path, const json& doc, int indent) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << doc.dump(indent) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

void write_trial_files(const std::filesystem::path& dir, std::size_t trial, const ClusterReport& report,
                       const json& extra) {
    const std::string t = std::to_string(trial);
    json doc = extra;
    doc.update(report_to_json(report));
    write_json(dir / ("report_" + t + ".json"), doc, -1);

    auto open = [&](const std::string& name) {
        std::ofstream out(dir / name);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir / name).string());
        }
        return out;
    };
    {
        auto out = open("trajectory_" + t + ".csv");
        write_trajectory_csv(out, report);
        if (!out) throw std::runtime_error("failed writing trajectory_" + t + ".csv");
    }
    {
        auto out = open("objective_" + t + ".csv");
        write_objective_csv(out, report);
        if (!out) throw std::runtime_error("failed writing objective_" + t + ".csv");
    }
}

}  // namespace afcl
