#include "cverr/linalg.hpp"

#include <cmath>

#include "cverr/errors.hpp"

namespace cverr {

namespace {

struct ThinQr {
    Matrix w;  // n x r, orthonormal columns
    Matrix r;  // r x r, upper triangular
};

// Modified Gram-Schmidt: each accepted column is subtracted from all later
// ones immediately, which keeps the loss of orthogonality proportional to
// the condition number instead of its square.
ThinQr modified_gram_schmidt(const Matrix& x) {
    const int n = x.rows;
    const int r = x.cols;
    ThinQr qr{Matrix(n, r), Matrix(r, r)};

    // Working copy of the columns; column j is fully orthogonalized by the
    // time the loop reaches it.
    Matrix v = x;
    std::vector<double> original_norm(r);
    for (int j = 0; j < r; ++j) {
        original_norm[j] = norm(v.column(j));
    }

    for (int j = 0; j < r; ++j) {
        std::vector<double> col = v.column(j);
        const double nj = norm(col);
        if (nj < kRankTolerance * original_norm[j] || nj == 0.0) {
            throw RankDeficiencyError(j);
        }
        qr.r(j, j) = nj;
        for (int i = 0; i < n; ++i) {
            qr.w(i, j) = col[i] / nj;
        }
        for (int l = j + 1; l < r; ++l) {
            double proj = 0.0;
            for (int i = 0; i < n; ++i) {
                proj += qr.w(i, j) * v(i, l);
            }
            qr.r(j, l) = proj;
            for (int i = 0; i < n; ++i) {
                v(i, l) -= proj * qr.w(i, j);
            }
        }
    }
    return qr;
}

}  // namespace

Matrix gram_schmidt(const Matrix& x) { return modified_gram_schmidt(x).w; }

ProjectionMatrix projection_matrix(const Matrix& x) {
    const Matrix w = gram_schmidt(x);
    Matrix p(x.rows, x.rows);
    for (int i = 0; i < x.rows; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = 0.0;
            for (int l = 0; l < x.cols; ++l) {
                s += w(i, l) * w(j, l);
            }
            p(i, j) = s;
            p(j, i) = s;  // exact symmetry by construction
        }
    }
    return {p, x.cols};
}

std::vector<double> solve_normal_equations(const Matrix& x, std::span<const double> y) {
    if (x.rows != static_cast<int>(y.size())) {
        throw DimensionError("solve_normal_equations: y length differs from row count");
    }
    const ThinQr qr = modified_gram_schmidt(x);
    const int r = x.cols;

    // b solves R b = W^T y by back substitution.
    std::vector<double> wty(r, 0.0);
    for (int j = 0; j < r; ++j) {
        double s = 0.0;
        for (int i = 0; i < x.rows; ++i) {
            s += qr.w(i, j) * y[i];
        }
        wty[j] = s;
    }
    std::vector<double> b(r, 0.0);
    for (int j = r - 1; j >= 0; --j) {
        double s = wty[j];
        for (int l = j + 1; l < r; ++l) {
            s -= qr.r(j, l) * b[l];
        }
        b[j] = s / qr.r(j, j);
    }
    return b;
}

std::vector<double> least_squares_fitted(const Matrix& x, std::span<const double> y) {
    if (x.rows != static_cast<int>(y.size())) {
        throw DimensionError("least_squares_fitted: y length differs from row count");
    }
    const Matrix w = gram_schmidt(x);
    const int r = x.cols;
    std::vector<double> wty(r, 0.0);
    for (int j = 0; j < r; ++j) {
        double s = 0.0;
        for (int i = 0; i < x.rows; ++i) {
            s += w(i, j) * y[i];
        }
        wty[j] = s;
    }
    std::vector<double> fitted(x.rows, 0.0);
    for (int i = 0; i < x.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < r; ++j) {
            s += w(i, j) * wty[j];
        }
        fitted[i] = s;
    }
    return fitted;
}

}  // namespace cverr
