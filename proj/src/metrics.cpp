#include "afcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "afcl/init.hpp"

namespace afcl {

namespace {

// Maps arbitrary labels onto 0..k-1 in ascending label order.
std::vector<std::size_t> compact_labels(const std::vector<int>& labels, std::size_t& k) {
    std::map<int, std::size_t> index;
    for (int l : labels) {
        index.emplace(l, 0);
    }
    std::size_t next = 0;
    for (auto& [label, idx] : index) {
        idx = next++;
    }
    k = next;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = index[labels[i]];
    }
    return out;
}

void check_lengths(const Matrix& data, const std::vector<int>& labels) {
    if (data.rows() != labels.size()) {
        throw std::invalid_argument("label count " + std::to_string(labels.size()) +
                                    " does not match row count " + std::to_string(data.rows()));
    }
}

}  // namespace

std::size_t distinct_label_count(const std::vector<int>& labels) {
    return std::set<int>(labels.begin(), labels.end()).size();
}

double silhouette(const Matrix& data, const std::vector<int>& labels) {
    check_lengths(data, labels);
    std::size_t k = 0;
    const auto cluster = compact_labels(labels, k);
    if (k < 2) {
        throw UndefinedIndex("silhouette needs at least two clusters");
    }
    const std::size_t n = data.rows();
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t c : cluster) {
        ++sizes[c];
    }

    double total = 0.0;
    std::vector<double> sums(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = cluster[i];
        if (sizes[own] == 1) {
            continue;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        const auto xi = data.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                sums[cluster[j]] += euclidean_distance(xi, data.row(j));
            }
        }
        const double a = sums[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c != own) {
                b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
            }
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) {
            total += (b - a) / denom;
        }
    }
    return total / static_cast<double>(n);
}

double calinski_harabasz(const Matrix& data, const std::vector<int>& labels) {
    check_lengths(data, labels);
    std::size_t k = 0;
    const auto cluster = compact_labels(labels, k);
    const std::size_t n = data.rows();
    if (k < 2) {
        throw UndefinedIndex("Calinski-Harabasz needs at least two clusters");
    }
    if (k >= n) {
        throw UndefinedIndex("Calinski-Harabasz needs more points than clusters");
    }
    const std::size_t d = data.cols();
    Point mean(d, 0.0);
    Matrix centroids(k, d);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = data.row(i);
        auto c = centroids.row(cluster[i]);
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += x[j];
            c[j] += x[j];
        }
        ++sizes[cluster[i]];
    }
    for (double& v : mean) {
        v /= static_cast<double>(n);
    }
    for (std::size_t c = 0; c < k; ++c) {
        for (double& v : centroids.row(c)) {
            v /= static_cast<double>(sizes[c]);
        }
    }
    double between = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        between += static_cast<double>(sizes[c]) * squared_distance(centroids.row(c), mean);
    }
    double within = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        within += squared_distance(data.row(i), centroids.row(cluster[i]));
    }
    if (within == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

double within_cluster_ss(const Matrix& data, const Matrix& centers, const std::vector<int>& labels) {
    double ss = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        ss += squared_distance(data.row(i), centers.row(static_cast<std::size_t>(labels[i])));
    }
    return ss;
}

KMeansResult lloyd(const Matrix& data, Matrix centers, std::size_t max_iter) {
    const std::size_t n = data.rows();
    const std::size_t k = centers.rows();
    const std::size_t d = data.cols();
    KMeansResult res;
    res.labels.assign(n, -1);

    auto assign = [&](std::vector<int>& labels) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dist = squared_distance(data.row(i), centers.row(c));
                if (dist < best_d) {
                    best_d = dist;
                    best = static_cast<int>(c);
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        return changed;
    };

    assign(res.labels);
    for (std::size_t it = 0; it < max_iter; ++it) {
        Matrix next(k, d);
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto c = next.row(static_cast<std::size_t>(res.labels[i]));
            const auto x = data.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                c[j] += x[j];
            }
            ++sizes[static_cast<std::size_t>(res.labels[i])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                continue;
            }
            for (double& v : next.row(c)) {
                v /= static_cast<double>(sizes[c]);
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            // Re-seed to the point worst served by its current center.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto own = static_cast<std::size_t>(res.labels[i]);
                if (sizes[own] <= 1) {
                    continue;
                }
                const double dist = squared_distance(data.row(i), next.row(own));
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            if (far_d > 0.0) {
                const auto own = static_cast<std::size_t>(res.labels[far]);
                --sizes[own];
                ++sizes[c];
                res.labels[far] = static_cast<int>(c);
                std::copy(data.row(far).begin(), data.row(far).end(), next.row(c).begin());
            } else {
                std::copy(centers.row(c).begin(), centers.row(c).end(), next.row(c).begin());
            }
        }
        centers = std::move(next);
        res.iterations = it + 1;
        if (!assign(res.labels)) {
            break;
        }
    }
    res.centers = std::move(centers);
    res.inertia = within_cluster_ss(data, res.centers, res.labels);
    return res;
}

KMeansResult centralized_kmeans(const Matrix& data, std::size_t k, std::uint64_t rng_seed,
                                std::size_t max_iter) {
    SeedSet init = kmeanspp_init(data, k, rng_seed);
    return lloyd(data, std::move(init.seeds), max_iter);
}

}  // namespace afcl
