#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "afcl/matrix.hpp"

namespace afcl {

// n x d real dataset. Labels are carried for evaluation only and never leave
// the process boundary of a simulated client.
struct DataMatrix {
    Matrix values;
    std::optional<std::vector<int>> labels;

    std::size_t rows() const noexcept { return values.rows(); }
    std::size_t cols() const noexcept { return values.cols(); }
};

struct ClientDataset {
    std::size_t client_id = 0;           // 1-based
    DataMatrix data;
    std::vector<std::size_t> global_rows;  // row indices into the partitioned matrix

    std::size_t size() const noexcept { return data.rows(); }
};

struct SynthSpec {
    std::vector<Point> centers;
    std::vector<double> stddevs;
    std::vector<std::size_t> counts;
    std::uint64_t rng_seed = 0;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CsvOptions {
    bool has_header = false;
    std::optional<std::size_t> label_col;
};

// Rows with an empty or missing cell are dropped; the drop count is reported
// on stderr. A non-empty cell that does not parse as a finite real is an error.
DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Writes data (and the label column last, named "label", when present).
void write_csv(const std::filesystem::path& path, const DataMatrix& m);

// A client's rows followed by its label (if any) and its row in the
// partitioned matrix.
void write_client_csv(const std::filesystem::path& path, const ClientDataset& c);

// Shortest text that parses back to the same double.
std::string format_real(double v);

// Per column (v - min) / (max - min); constant columns map to zero.
DataMatrix minmax_normalize(const DataMatrix& m);

// Isotropic Gaussian components, rows shuffled, labels = component index.
DataMatrix synth_gaussian(const SynthSpec& spec);

// `blobs` centers drawn in [0.1, 0.9]^d at least `min_gap` apart, `n` rows
// split evenly. The gap shrinks by 10% whenever the box cannot hold it.
SynthSpec blob_spec(std::size_t blobs, std::size_t n, std::size_t d, double stddev,
                    std::uint64_t rng_seed, double min_gap = 0.3);

// k-means split with k = p: cluster i becomes client i + 1. Clusters are
// re-run with a fresh seed (up to 10 times) if any comes out empty.
std::vector<ClientDataset> partition_noniid(const DataMatrix& m, std::size_t p,
                                            std::uint64_t rng_seed);

// Concatenation of client data in client/row order.
DataMatrix concat_clients(const std::vector<ClientDataset>& clients);

}  // namespace afcl
