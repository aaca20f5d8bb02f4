#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cverr/dataset.hpp"
#include "cverr/ibl.hpp"
#include "cverr/linreg.hpp"
#include "cverr/matrix.hpp"
#include "cverr/parallel.hpp"
#include "cverr/rng.hpp"

namespace cverr {

/// A modeling procedure: fit on (x, y) and return the fitted values at the
/// rows of x.
using FitPredict =
    std::function<std::vector<double>(const Matrix& x, std::span<const double> y)>;

// The error decomposition for one pair of output replicates (y1 trains,
// y2 tests):
//   train            = fit(y1) - y1
//   cross_validation = fit(y1) - y2
//   instability      = fit(y2) - fit(y1)
//   combined         = train + instability   (== fit(y2) - y1)
struct ErrorDecomposition {
    std::vector<double> train;
    std::vector<double> cross_validation;
    std::vector<double> instability;
    std::vector<double> combined;

    double train_norm, cross_validation_norm, instability_norm, combined_norm;
    double train_sq, cross_validation_sq, instability_sq, combined_sq;
};

ErrorDecomposition decompose(const FitPredict& fit_fn, const Matrix& x,
                             std::span<const double> y1, std::span<const double> y2);

// Monte-Carlo estimate of a procedure's instability. Each trial perturbs the
// training outputs with fresh variance-2*sigma^2 noise (the second-moment
// structure of an independent replicate pair) and refits.
struct MonteCarloInstability {
    double mean_norm = 0.0;  // average ||instability|| across trials
    double mean_sq = 0.0;    // average ||instability||^2
    double se_norm = 0.0;    // standard error of mean_norm
    double se_sq = 0.0;
    int trials = 0;
};

MonteCarloInstability monte_carlo_instability(const FitPredict& fit_fn, const Matrix& x,
                                              std::span<const double> y1,
                                              const NoiseSpec& noise, int trials,
                                              std::uint64_t seed,
                                              ExecutionMode mode = ExecutionMode::parallel);

/// Residual mean square sse / (n - r) from the least-squares fit on the given
/// design matrix (r = column count). Requires n > r.
double estimate_sigma_sq_residual(const Matrix& design, std::span<const double> y);

// One entry of the model grid searched by select_model.
struct CandidateSpec {
    enum class Family { linear, instance };
    Family family = Family::linear;
    int order = 1;  // polynomial terms for linear, neighborhood size for instance
    Weighting weighting = Weighting::uniform;  // instance only

    std::string id() const;
};

struct SelectionRow {
    std::string id;
    double sse = 0.0;
    InstabilityBounds instability;  // at the report's sigma^2
    double instability_coeff_lower = 0.0;  // instability = coeff * sigma^2
    double instability_coeff_upper = 0.0;
    double cvc_lower = 0.0;  // sse + instability bounds
    double cvc_upper = 0.0;
    std::optional<double> aic;  // linear candidates with sigma^2 > 0
};

struct SelectionReport {
    std::vector<SelectionRow> rows;
    double sigma_sq = 0.0;
    std::string chosen;              // id of the argmin row
    std::vector<std::string> tied;   // every co-minimal id, in candidate order
};

/// Fits every candidate on the dataset and picks the row minimizing the
/// cross-validation criterion at the given noise level. Interval-valued rows
/// (similarity-proportional weights) only compete when their upper bound
/// beats every exact row.
SelectionReport select_model(const std::vector<CandidateSpec>& candidates, const Dataset& ds,
                             double sigma_sq);

/// The argmin/tie logic of select_model on already-computed rows.
/// Exposed so the invariance of the choice under affine rescaling of the
/// criterion can be exercised directly.
void choose_from_rows(SelectionReport& report);

std::string selection_to_json(const SelectionReport& report);
std::string selection_to_table(const SelectionReport& report);
std::string selection_to_csv(const SelectionReport& report);

}  // namespace cverr
