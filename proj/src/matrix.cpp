#include "cverr/matrix.hpp"

#include <cmath>
#include <utility>

#include "cverr/errors.hpp"

namespace cverr {

Matrix::Matrix(int rows, int cols) : rows(rows), cols(cols) {
    if (rows < 1 || cols < 1) {
        throw DimensionError("matrix dimensions must be positive");
    }
    data.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows(rows), cols(cols), data(std::move(entries)) {
    if (rows < 1 || cols < 1) {
        throw DimensionError("matrix dimensions must be positive");
    }
    if (data.size() != static_cast<size_t>(rows) * cols) {
        throw DimensionError("entry count does not match rows*cols");
    }
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw DimensionError("matrix entries must be finite");
        }
    }
}

std::vector<double> Matrix::column(int j) const {
    std::vector<double> out(rows);
    for (int i = 0; i < rows; ++i) {
        out[i] = (*this)(i, j);
    }
    return out;
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || columns[0].empty()) {
        throw DimensionError("from_columns requires at least one non-empty column");
    }
    const int n = static_cast<int>(columns[0].size());
    const int r = static_cast<int>(columns.size());
    Matrix m(n, r);
    for (int j = 0; j < r; ++j) {
        if (static_cast<int>(columns[j].size()) != n) {
            throw DimensionError("ragged columns");
        }
        for (int i = 0; i < n; ++i) {
            m(i, j) = columns[j][i];
        }
    }
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw DimensionError("matmul: inner dimensions differ");
    }
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < b.cols; ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols != static_cast<int>(x.size())) {
        throw DimensionError("matvec: dimension mismatch");
    }
    std::vector<double> y(a.rows, 0.0);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) {
            s += a(i, j) * x[j];
        }
        y[i] = s;
    }
    return y;
}

double trace(const Matrix& a) {
    if (a.rows != a.cols) {
        throw DimensionError("trace: matrix must be square");
    }
    double s = 0.0;
    for (int i = 0; i < a.rows; ++i) {
        s += a(i, i);
    }
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw DimensionError("max_abs_diff: shapes differ");
    }
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("dot: lengths differ");
    }
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm_sq(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("subtract: lengths differ");
    }
    std::vector<double> c(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        c[i] = a[i] - b[i];
    }
    return c;
}

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("add: lengths differ");
    }
    std::vector<double> c(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        c[i] = a[i] + b[i];
    }
    return c;
}

}  // namespace cverr
