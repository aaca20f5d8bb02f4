#include "cverr/ibl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cverr/errors.hpp"

namespace cverr {

double similarity(std::span<const double> u1, std::span<const double> u2, Similarity kind) {
    if (u1.size() != u2.size()) {
        throw DimensionError("similarity: dimension mismatch");
    }
    switch (kind) {
        case Similarity::overlap: {
            double s = 0.0;
            for (size_t j = 0; j < u1.size(); ++j) {
                s += 1.0 - std::abs(u1[j] - u2[j]);
            }
            return s;
        }
        case Similarity::negative_euclidean: {
            double s = 0.0;
            for (size_t j = 0; j < u1.size(); ++j) {
                const double d = u1[j] - u2[j];
                s += d * d;
            }
            return -std::sqrt(s);
        }
    }
    return 0.0;
}

NeighborSet nearest_neighbors(const IblModel& model, std::span<const double> v, int k) {
    const int n = model.instances.n();
    if (n < 1) {
        throw InvalidArgumentError("empty instance store");
    }
    if (k < 1 || k > n) {
        throw InvalidArgumentError("k must be in [1, n]");
    }
    std::vector<std::pair<double, int>> scored(n);
    for (int i = 0; i < n; ++i) {
        scored[i] = {similarity(v, model.instances.x.row(i), model.similarity), i};
    }
    // descending similarity, ties toward the lower row index
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    NeighborSet ns;
    ns.indices.resize(k);
    ns.similarities.resize(k);
    ns.weights.resize(k);
    for (int i = 0; i < k; ++i) {
        ns.similarities[i] = scored[i].first;
        ns.indices[i] = scored[i].second;
    }

    if (model.weighting == Weighting::uniform) {
        std::fill(ns.weights.begin(), ns.weights.end(), 1.0 / k);
        return ns;
    }
    const double total = std::accumulate(ns.similarities.begin(), ns.similarities.end(), 0.0);
    const double min_sim = *std::min_element(ns.similarities.begin(), ns.similarities.end());
    if (min_sim <= 0.0 || total <= 0.0) {
        // proportional weights would leave the simplex; fall back
        std::fill(ns.weights.begin(), ns.weights.end(), 1.0 / k);
        ns.uniform_fallback = true;
        return ns;
    }
    for (int i = 0; i < k; ++i) {
        ns.weights[i] = ns.similarities[i] / total;
    }
    return ns;
}

double predict_nearest(const IblModel& model, std::span<const double> v) {
    const NeighborSet ns = nearest_neighbors(model, v, 1);
    return model.instances.y[ns.indices[0]];
}

double predict(const IblModel& model, std::span<const double> v) {
    const NeighborSet ns = nearest_neighbors(model, v, model.k);
    double out = 0.0;
    for (size_t i = 0; i < ns.indices.size(); ++i) {
        out += ns.weights[i] * model.instances.y[ns.indices[i]];
    }
    return out;
}

std::vector<double> predict_rows(const IblModel& model, const Matrix& x) {
    std::vector<double> out(x.rows);
    for (int i = 0; i < x.rows; ++i) {
        out[i] = predict(model, x.row(i));
    }
    return out;
}

TrainingError training_error_ibl(const IblModel& model, const Dataset& ds) {
    std::vector<double> residuals = predict_rows(model, ds.x);
    for (size_t i = 0; i < residuals.size(); ++i) {
        residuals[i] -= ds.y[i];
    }
    return summarize_residuals(std::move(residuals));
}

Dataset reduce_instances(const Dataset& ds, double similarity_threshold, Similarity kind) {
    std::vector<int> retained;
    for (int i = 0; i < ds.n(); ++i) {
        bool redundant = false;
        for (int kept : retained) {
            if (similarity(ds.x.row(i), ds.x.row(kept), kind) > similarity_threshold) {
                redundant = true;
                break;
            }
        }
        if (!redundant) {
            retained.push_back(i);
        }
    }
    Matrix x(static_cast<int>(retained.size()), ds.input_dim());
    std::vector<double> y(retained.size());
    for (size_t i = 0; i < retained.size(); ++i) {
        for (int j = 0; j < ds.input_dim(); ++j) {
            x(static_cast<int>(i), j) = ds.x(retained[i], j);
        }
        y[i] = ds.y[retained[i]];
    }
    return {std::move(x), std::move(y)};
}

InstabilityBounds analytic_instability_sq_ibl(double sigma, int n, int k, Weighting weighting) {
    if (sigma < 0.0) {
        throw InvalidArgumentError("sigma must be non-negative");
    }
    if (k < 1 || k > n) {
        throw InvalidArgumentError("k must be in [1, n]");
    }
    const double most_stable = 2.0 * sigma * sigma * n / k;
    if (weighting == Weighting::uniform) {
        return {most_stable, most_stable};
    }
    const double least_stable = 2.0 * sigma * sigma * n;
    return {most_stable, least_stable};
}

InstabilityBounds analytic_instability_sq_reduced(double sigma, int n) {
    if (sigma < 0.0) {
        throw InvalidArgumentError("sigma must be non-negative");
    }
    const double v = 2.0 * sigma * sigma * n;
    return {v, v};
}

double cvc_ibl(double sse, double sigma, int n, int k, Weighting weighting) {
    if (sse < 0.0) {
        throw InvalidArgumentError("sse must be non-negative");
    }
    if (weighting != Weighting::uniform) {
        throw InvalidArgumentError(
            "cvc_ibl is exact only for uniform weights; only bounds exist otherwise");
    }
    return sse + analytic_instability_sq_ibl(sigma, n, k, weighting).value();
}

}  // namespace cverr
