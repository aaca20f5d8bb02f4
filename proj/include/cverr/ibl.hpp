#pragma once

#include <span>
#include <vector>

#include "cverr/dataset.hpp"
#include "cverr/matrix.hpp"

namespace cverr {

// Similarity between input rows. Both kinds are "reasonable": a vector is
// strictly more similar to itself than to any distinct vector.
enum class Similarity {
    overlap,             // sum_j (1 - |u1_j - u2_j|); intended for inputs in [0,1]
    negative_euclidean,  // -||u1 - u2||
};

double similarity(std::span<const double> u1, std::span<const double> u2, Similarity kind);

enum class Weighting { uniform, similarity_proportional };

// The k most similar stored rows for one query, most similar first.
// Ties in similarity resolve toward the lower row index.
struct NeighborSet {
    std::vector<int> indices;
    std::vector<double> similarities;
    std::vector<double> weights;    // non-negative, sum to 1
    bool uniform_fallback = false;  // proportional weights were degenerate
};

// Instance-based model: the stored data plus the neighborhood rule.
struct IblModel {
    Dataset instances;
    int k = 1;
    Weighting weighting = Weighting::uniform;
    Similarity similarity = Similarity::overlap;
};

NeighborSet nearest_neighbors(const IblModel& model, std::span<const double> v, int k);

/// Output of the single most similar stored row (1-nearest-neighbor).
double predict_nearest(const IblModel& model, std::span<const double> v);

/// Weighted average of the k most similar stored outputs. Equals
/// predict_nearest when k = 1.
double predict(const IblModel& model, std::span<const double> v);

std::vector<double> predict_rows(const IblModel& model, const Matrix& x);

/// Residuals on a dataset; each stored point participates in its own
/// neighborhood (no leave-one-out).
TrainingError training_error_ibl(const IblModel& model, const Dataset& ds);

/// Greedy redundancy reduction in row order: a row is dropped when its
/// similarity to any retained row exceeds the threshold. Uses inputs only,
/// never the outputs.
Dataset reduce_instances(const Dataset& ds, double similarity_threshold, Similarity kind);

// Expected squared instability, exact or bracketed.
struct InstabilityBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool is_exact() const { return lower == upper; }
    double value() const { return lower; }  // meaningful when exact
};

/// For weighted k-NN: uniform weights give exactly 2 sigma^2 n / k;
/// similarity-proportional weights fall in [2 sigma^2 n / k, 2 sigma^2 n].
InstabilityBounds analytic_instability_sq_ibl(double sigma, int n, int k, Weighting weighting);

/// For 1-NN over any reduced instance store: exactly 2 sigma^2 n,
/// independent of how many rows the reduction retained.
InstabilityBounds analytic_instability_sq_reduced(double sigma, int n);

/// Cross-validation criterion for uniform-weight k-NN: sse + 2 sigma^2 n / k.
/// Throws for non-uniform weighting, where only bounds are available.
double cvc_ibl(double sse, double sigma, int n, int k, Weighting weighting = Weighting::uniform);

}  // namespace cverr
