#include "cverr/linreg.hpp"

#include <cmath>
#include <numbers>

#include "cverr/errors.hpp"
#include "cverr/linalg.hpp"

namespace cverr {

Matrix polynomial_design_matrix(std::span<const double> x, const PolynomialBasisSpec& spec) {
    if (spec.terms < 1) {
        throw InvalidArgumentError("polynomial basis needs at least one term");
    }
    const int n = static_cast<int>(x.size());
    Matrix design(n, spec.terms);
    for (int i = 0; i < n; ++i) {
        double power = 1.0;
        for (int j = 0; j < spec.terms; ++j) {
            design(i, j) = power;
            power *= x[i];
        }
    }
    return design;
}

double LinearModel::predict(std::span<const double> v) const {
    if (polynomial) {
        const double xi = v[basis.input_index];
        double acc = 0.0;
        for (size_t j = coefficients.size(); j-- > 0;) {
            acc = acc * xi + coefficients[j];
        }
        return acc;
    }
    return dot(coefficients, v);
}

std::vector<double> LinearModel::predict_rows(const Matrix& x) const {
    std::vector<double> out(x.rows);
    for (int i = 0; i < x.rows; ++i) {
        out[i] = predict(x.row(i));
    }
    return out;
}

LinearModel fit(const Matrix& design, std::span<const double> y) {
    if (design.cols > design.rows) {
        throw RankDeficiencyError(design.rows);  // more terms than rows cannot be independent
    }
    LinearModel model;
    model.coefficients = solve_normal_equations(design, y);
    model.basis = {design.cols, 0};
    model.polynomial = false;
    return model;
}

LinearModel fit_polynomial(std::span<const double> x, const PolynomialBasisSpec& spec,
                           std::span<const double> y) {
    const Matrix design = polynomial_design_matrix(x, spec);
    LinearModel model = fit(design, y);
    model.basis = spec;
    model.polynomial = true;
    return model;
}

TrainingError training_error(const LinearModel& model, const Matrix& x,
                             std::span<const double> y) {
    if (x.rows != static_cast<int>(y.size())) {
        throw DimensionError("training_error: y length differs from row count");
    }
    std::vector<double> residuals = model.predict_rows(x);
    for (size_t i = 0; i < residuals.size(); ++i) {
        residuals[i] -= y[i];
    }
    return summarize_residuals(std::move(residuals));
}

double analytic_instability_sq(double sigma, int terms) {
    if (sigma < 0.0) {
        throw InvalidArgumentError("sigma must be non-negative");
    }
    if (terms < 1) {
        throw InvalidArgumentError("terms must be at least 1");
    }
    return 2.0 * sigma * sigma * terms;
}

double analytic_instability_norm_bound(double sigma, int terms) {
    if (sigma < 0.0) {
        throw InvalidArgumentError("sigma must be non-negative");
    }
    return sigma * std::sqrt(2.0 * terms);
}

double cvc(double sse, double sigma, int terms) {
    if (sse < 0.0) {
        throw InvalidArgumentError("sse must be non-negative");
    }
    return sse + analytic_instability_sq(sigma, terms);
}

double aic_linear(double sse, double sigma, int n, int terms) {
    if (sigma <= 0.0) {
        throw InvalidArgumentError("aic requires sigma > 0");
    }
    const double sigma_sq = sigma * sigma;
    return n * std::log(2.0 * std::numbers::pi * sigma_sq) + sse / sigma_sq + 2.0 * terms;
}

}  // namespace cverr
