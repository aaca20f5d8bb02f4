#pragma once

#include <span>
#include <vector>

namespace cverr {

// Dense row-major matrix. Everything here targets small problems
// (a few hundred rows at most), so the operations are plain loops.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major, rows*cols entries

    Matrix() = default;
    Matrix(int rows, int cols);                               // zero-filled
    Matrix(int rows, int cols, std::vector<double> entries);  // validates size and finiteness

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    std::span<const double> row(int i) const {
        return {data.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)};
    }
    std::span<double> row(int i) {
        return {data.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)};
    }

    std::vector<double> column(int j) const;

    static Matrix identity(int n);
    static Matrix from_columns(const std::vector<std::vector<double>>& columns);
};

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& a, std::span<const double> x);

double trace(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm_sq(std::span<const double> a);
double norm(std::span<const double> a);
std::vector<double> subtract(std::span<const double> a, std::span<const double> b);  // a - b
std::vector<double> add(std::span<const double> a, std::span<const double> b);

}  // namespace cverr
