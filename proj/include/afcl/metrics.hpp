#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "afcl/matrix.hpp"

namespace afcl {

class UndefinedIndex : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Mean silhouette over all points. Singleton clusters contribute 0.
// Labels need not be contiguous; at least two distinct labels are required.
double silhouette(const Matrix& data, const std::vector<int>& labels);

// [between SS / (k - 1)] / [within SS / (n - k)]. Returns +infinity when the
// within-cluster SS is zero and k < n.
double calinski_harabasz(const Matrix& data, const std::vector<int>& labels);

struct KMeansResult {
    Matrix centers;
    std::vector<int> labels;
    std::size_t iterations = 0;
    double inertia = 0.0;
};

// k-means++ seeding followed by Lloyd iterations.
KMeansResult centralized_kmeans(const Matrix& data, std::size_t k, std::uint64_t rng_seed,
                                std::size_t max_iter = 300);

// Lloyd iterations from the given initial centers. Empty clusters are
// re-seeded to the point farthest from its current center.
KMeansResult lloyd(const Matrix& data, Matrix centers, std::size_t max_iter = 300);

double within_cluster_ss(const Matrix& data, const Matrix& centers, const std::vector<int>& labels);

std::size_t distinct_label_count(const std::vector<int>& labels);

}  // namespace afcl
