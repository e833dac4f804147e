#include "afcl/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace afcl {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& r : rows) {
        append_row(std::span<const double>(r.begin(), r.size()));
    }
}

Matrix Matrix::from_rows(const std::vector<Point>& rows) {
    Matrix m;
    for (const auto& r : rows) {
        m.append_row(r);
    }
    return m;
}

void Matrix::append_row(std::span<const double> r) {
    if (rows_ == 0 && cols_ == 0) {
        cols_ = r.size();
    } else if (r.size() != cols_) {
        throw std::invalid_argument("row width " + std::to_string(r.size()) +
                                    " does not match matrix width " + std::to_string(cols_));
    }
    values_.insert(values_.end(), r.begin(), r.end());
    ++rows_;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return std::sqrt(squared_distance(a, b));
}

}  // namespace afcl
