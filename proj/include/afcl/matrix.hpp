#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace afcl {

using Point = std::vector<double>;

// Dense row-major matrix of doubles. Rows are exposed as spans so callers
// never index into the flat buffer directly.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix from_rows(const std::vector<Point>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    std::span<double> row(std::size_t i) noexcept {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * cols_, cols_};
    }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

    void append_row(std::span<const double> r);
    Point row_copy(std::size_t i) const { return {row(i).begin(), row(i).end()}; }

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace afcl
