#pragma once

#include <span>
#include <vector>

#include "cverr/dataset.hpp"
#include "cverr/matrix.hpp"

namespace cverr {

// Polynomial basis: powers 0..terms-1 of one raw input.
struct PolynomialBasisSpec {
    int terms = 1;        // number of columns (constant column included)
    int input_index = 0;  // which raw input is expanded
};

/// Design matrix whose column j (0-based) holds x^j element-wise.
Matrix polynomial_design_matrix(std::span<const double> x, const PolynomialBasisSpec& spec);

// A fitted linear model. When `polynomial` is set, predict() expands powers
// of one raw input; otherwise it takes an already-built design row.
struct LinearModel {
    std::vector<double> coefficients;
    PolynomialBasisSpec basis;
    bool polynomial = false;

    int terms() const { return static_cast<int>(coefficients.size()); }
    double predict(std::span<const double> v) const;
    std::vector<double> predict_rows(const Matrix& x) const;
};

/// Least-squares fit on an explicit design matrix (raw-column basis).
LinearModel fit(const Matrix& design, std::span<const double> y);

/// Least-squares polynomial fit on one raw input.
LinearModel fit_polynomial(std::span<const double> x, const PolynomialBasisSpec& spec,
                           std::span<const double> y);

/// Residuals of the model on (x, y): prediction minus observation.
TrainingError training_error(const LinearModel& model, const Matrix& x,
                             std::span<const double> y);

/// Expected squared instability of an r-term least-squares fit: 2 sigma^2 r.
double analytic_instability_sq(double sigma, int terms);

/// Companion upper bound on the expected instability norm: sigma * sqrt(2r).
double analytic_instability_norm_bound(double sigma, int terms);

/// Cross-validation criterion: sse + 2 sigma^2 r. An unbiased estimate of the
/// expected squared cross-validation error of the fit.
double cvc(double sse, double sigma, int terms);

/// Akaike information criterion for a linear model under normal noise:
/// n log(2 pi sigma^2) + sse / sigma^2 + 2r. Affinely equivalent to cvc().
/// Requires sigma > 0.
double aic_linear(double sse, double sigma, int n, int terms);

}  // namespace cverr
