#include "afcl/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string_view>

#include "afcl/metrics.hpp"
#include "afcl/rng.hpp"

namespace afcl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::optional<double> parse_real(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

}  // namespace

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read " + path.string());
    }
    DataMatrix out;
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t expected = 0;
    std::size_t dropped = 0;
    bool header_pending = options.has_header;
    Point row;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (header_pending) {
            header_pending = false;
            expected = fields.size();
            continue;
        }
        if (expected == 0) {
            expected = fields.size();
        }
        if (options.label_col && *options.label_col >= expected) {
            throw DataError("label column " + std::to_string(*options.label_col) + " out of range");
        }
        if (fields.size() != expected ||
            std::any_of(fields.begin(), fields.end(), [](std::string_view f) { return is_missing(f); })) {
            ++dropped;
            continue;
        }
        row.clear();
        int label = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto value = parse_real(fields[c]);
            if (!value) {
                throw DataError("non-numeric cell '" + std::string(fields[c]) + "' at line " +
                                std::to_string(line_no) + ", column " + std::to_string(c));
            }
            if (options.label_col && c == *options.label_col) {
                if (*value != std::floor(*value)) {
                    throw DataError("non-integer label at line " + std::to_string(line_no));
                }
                label = static_cast<int>(*value);
            } else {
                row.push_back(*value);
            }
        }
        out.values.append_row(row);
        if (options.label_col) {
            labels.push_back(label);
        }
    }
    if (dropped > 0) {
        std::cerr << path.string() << ": dropped " << dropped << " row(s) with missing cells\n";
    }
    if (out.values.rows() == 0 || out.values.cols() == 0) {
        throw DataError("no usable rows in " + path.string());
    }
    if (options.label_col) {
        out.labels = std::move(labels);
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const DataMatrix& m) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        out << (j ? "," : "") << "x" << j;
    }
    if (m.labels) {
        out << ",label";
    }
    out << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.values.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            out << (j ? "," : "") << format_real(r[j]);
        }
        if (m.labels) {
            out << ',' << (*m.labels)[i];
        }
        out << '\n';
    }
    if (!out) {
        throw DataError("failed writing " + path.string());
    }
}

void write_client_csv(const std::filesystem::path& path, const ClientDataset& c) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    const DataMatrix& m = c.data;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        out << "x" << j << ',';
    }
    if (m.labels) {
        out << "label,";
    }
    out << "row\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (double v : m.values.row(i)) {
            out << format_real(v) << ',';
        }
        if (m.labels) {
            out << (*m.labels)[i] << ',';
        }
        out << c.global_rows[i] << '\n';
    }
    if (!out) {
        throw DataError("failed writing " + path.string());
    }
}

DataMatrix minmax_normalize(const DataMatrix& m) {
    DataMatrix out = m;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            lo = std::min(lo, m.values(i, j));
            hi = std::max(hi, m.values(i, j));
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            out.values(i, j) = span > 0.0 ? (m.values(i, j) - lo) / span : 0.0;
        }
    }
    return out;
}

DataMatrix synth_gaussian(const SynthSpec& spec) {
    if (spec.centers.empty() || spec.centers.size() != spec.counts.size() ||
        spec.centers.size() != spec.stddevs.size()) {
        throw std::invalid_argument("synth spec needs matching centers, stddevs and counts");
    }
    const std::size_t d = spec.centers.front().size();
    Rng rng(spec.rng_seed);
    Matrix pts;
    std::vector<int> labels;
    Point row(d);
    for (std::size_t c = 0; c < spec.centers.size(); ++c) {
        if (spec.counts[c] < 1 || !(spec.stddevs[c] > 0.0) || spec.centers[c].size() != d) {
            throw std::invalid_argument("synth component " + std::to_string(c) + " is invalid");
        }
        std::normal_distribution<double> noise(0.0, spec.stddevs[c]);
        for (std::size_t i = 0; i < spec.counts[c]; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = spec.centers[c][j] + noise(rng);
            }
            pts.append_row(row);
            labels.push_back(static_cast<int>(c));
        }
    }
    std::vector<std::size_t> order(pts.rows());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    DataMatrix out;
    out.labels.emplace();
    for (std::size_t i : order) {
        out.values.append_row(pts.row(i));
        out.labels->push_back(labels[i]);
    }
    return out;
}

SynthSpec blob_spec(std::size_t blobs, std::size_t n, std::size_t d, double stddev,
                    std::uint64_t rng_seed, double min_gap) {
    if (blobs < 1 || d < 1 || n < blobs) {
        throw std::invalid_argument("blob spec needs blobs >= 1, d >= 1 and n >= blobs");
    }
    if (!(stddev > 0.0)) {
        throw std::invalid_argument("blob stddev must be positive");
    }
    SynthSpec spec;
    spec.rng_seed = rng_seed;
    Rng rng(derive_seed(rng_seed, streams::experiment));
    std::size_t attempts = 0;
    while (spec.centers.size() < blobs) {
        Point c(d);
        for (double& v : c) {
            v = 0.1 + 0.8 * uniform01(rng);
        }
        const bool clear = std::all_of(spec.centers.begin(), spec.centers.end(),
                                       [&](const Point& o) { return euclidean_distance(o, c) >= min_gap; });
        if (clear) {
            spec.centers.push_back(std::move(c));
            attempts = 0;
        } else if (++attempts > 2000) {
            spec.centers.clear();
            min_gap *= 0.9;
            attempts = 0;
        }
    }
    spec.stddevs.assign(blobs, stddev);
    spec.counts.assign(blobs, n / blobs);
    for (std::size_t c = 0; c < n % blobs; ++c) {
        ++spec.counts[c];
    }
    return spec;
}

std::vector<ClientDataset> partition_noniid(const DataMatrix& m, std::size_t p, std::uint64_t rng_seed) {
    if (p < 1) {
        throw std::invalid_argument("need at least one client");
    }
    if (p > m.rows()) {
        throw std::invalid_argument("more clients (" + std::to_string(p) + ") than rows (" +
                                    std::to_string(m.rows()) + ")");
    }
    constexpr std::size_t max_attempts = 11;  // first run plus 10 retries
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        const KMeansResult km = centralized_kmeans(m.values, p, derive_seed(rng_seed, streams::partition, attempt));
        std::vector<ClientDataset> clients(p);
        for (std::size_t g = 0; g < p; ++g) {
            clients[g].client_id = g + 1;
            if (m.labels) {
                clients[g].data.labels.emplace();
            }
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            auto& c = clients[static_cast<std::size_t>(km.labels[i])];
            c.data.values.append_row(m.values.row(i));
            c.global_rows.push_back(i);
            if (m.labels) {
                c.data.labels->push_back((*m.labels)[i]);
            }
        }
        if (std::all_of(clients.begin(), clients.end(), [](const ClientDataset& c) { return c.size() > 0; })) {
            return clients;
        }
    }
    throw DataError("k-means split left an empty client after 10 retries");
}

DataMatrix concat_clients(const std::vector<ClientDataset>& clients) {
    DataMatrix out;
    const bool labelled = !clients.empty() && clients.front().data.labels.has_value();
    if (labelled) {
        out.labels.emplace();
    }
    for (const auto& c : clients) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            out.values.append_row(c.data.values.row(i));
            if (labelled) {
                out.labels->push_back((*c.data.labels)[i]);
            }
        }
    }
    return out;
}

}  // namespace afcl
