#include "cverr/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "cverr/errors.hpp"
#include "cverr/linalg.hpp"
#include "cverr/stats.hpp"

#include "json.hpp"

namespace cverr {

ErrorDecomposition decompose(const FitPredict& fit_fn, const Matrix& x,
                             std::span<const double> y1, std::span<const double> y2) {
    if (x.rows != static_cast<int>(y1.size()) || x.rows != static_cast<int>(y2.size())) {
        throw DimensionError("decompose: output lengths differ from row count");
    }
    const std::vector<double> fit1 = fit_fn(x, y1);
    const std::vector<double> fit2 = fit_fn(x, y2);

    ErrorDecomposition d;
    d.train = subtract(fit1, y1);
    d.cross_validation = subtract(fit1, y2);
    d.instability = subtract(fit2, fit1);
    d.combined = add(d.train, d.instability);  // identity combined = train + instability

    d.train_sq = norm_sq(d.train);
    d.cross_validation_sq = norm_sq(d.cross_validation);
    d.instability_sq = norm_sq(d.instability);
    d.combined_sq = norm_sq(d.combined);
    d.train_norm = std::sqrt(d.train_sq);
    d.cross_validation_norm = std::sqrt(d.cross_validation_sq);
    d.instability_norm = std::sqrt(d.instability_sq);
    d.combined_norm = std::sqrt(d.combined_sq);
    return d;
}

MonteCarloInstability monte_carlo_instability(const FitPredict& fit_fn, const Matrix& x,
                                              std::span<const double> y1,
                                              const NoiseSpec& noise, int trials,
                                              std::uint64_t seed, ExecutionMode mode) {
    if (trials < 1) {
        throw InvalidArgumentError("monte_carlo_instability: trials must be at least 1");
    }
    if (noise.sigma <= 0.0) {
        throw InvalidArgumentError("monte_carlo_instability: sigma must be positive");
    }
    if (x.rows != static_cast<int>(y1.size())) {
        throw DimensionError("monte_carlo_instability: y1 length differs from row count");
    }
    const int n = x.rows;
    const std::vector<double> base = fit_fn(x, y1);

    // An independent replicate pair differs by noise of variance 2 sigma^2
    // per component, so each simulated testing set re-rolls the outputs with
    // scale sigma*sqrt(2).
    const double scale = noise.sigma * std::numbers::sqrt2;

    std::vector<double> norms(trials);
    std::vector<double> sqs(trials);
    for_each_trial(trials, mode, [&](int t) {
        StandardizedSampler sampler(noise.distribution, derive_seed(seed, t));
        std::vector<double> y2(n);
        for (int i = 0; i < n; ++i) {
            y2[i] = y1[i] + scale * sampler.next();
        }
        const std::vector<double> refit = fit_fn(x, y2);
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = refit[i] - base[i];
            sq += d * d;
        }
        sqs[t] = sq;
        norms[t] = std::sqrt(sq);
    });

    const MeanSe mn = mean_se(norms);
    const MeanSe ms = mean_se(sqs);
    return {mn.mean, ms.mean, mn.se, ms.se, trials};
}

double estimate_sigma_sq_residual(const Matrix& design, std::span<const double> y) {
    const int n = design.rows;
    const int r = design.cols;
    if (n <= r) {
        throw InvalidArgumentError("sigma estimation requires more rows than terms");
    }
    const std::vector<double> fitted = least_squares_fitted(design, y);
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = fitted[i] - y[i];
        sse += d * d;
    }
    return sse / static_cast<double>(n - r);
}

std::string CandidateSpec::id() const {
    if (family == Family::linear) {
        return "lr:" + std::to_string(order);
    }
    return "ibl:k=" + std::to_string(order) +
           (weighting == Weighting::uniform ? ",uniform" : ",similarity");
}

namespace {

// Floating-point CVC values for the ties the criterion produces by design
// (equal-criterion models reached through different arithmetic).
constexpr double kTieRelTol = 1e-9;

bool close(double a, double b) {
    return std::abs(a - b) <= kTieRelTol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

void choose_from_rows(SelectionReport& report) {
    report.chosen.clear();
    report.tied.clear();
    if (report.rows.empty()) {
        throw InvalidArgumentError("no fittable candidates");
    }

    double min_exact = std::numeric_limits<double>::infinity();
    for (const auto& row : report.rows) {
        if (row.instability.is_exact()) {
            min_exact = std::min(min_exact, row.cvc_lower);
        }
    }

    // Interval rows compete only when their worst case beats every exact row.
    auto eligible = [&](const SelectionRow& row) {
        if (row.instability.is_exact()) return true;
        return row.cvc_upper < min_exact;
    };
    auto criterion = [](const SelectionRow& row) {
        return row.instability.is_exact() ? row.cvc_lower : row.cvc_upper;
    };

    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& row : report.rows) {
        if (eligible(row)) {
            best = std::min(best, criterion(row));
            any = true;
        }
    }
    if (!any) {
        throw InvalidArgumentError("no candidate is eligible for selection");
    }

    std::vector<const SelectionRow*> tied;
    for (const auto& row : report.rows) {
        if (eligible(row) && close(criterion(row), best)) {
            tied.push_back(&row);
        }
    }
    // among the tied rows, the more stable one wins; first in candidate
    // order when that is tied too
    double best_instability = std::numeric_limits<double>::infinity();
    for (const auto* row : tied) {
        best_instability = std::min(best_instability, row->instability.lower);
    }
    for (const auto* row : tied) {
        report.tied.push_back(row->id);
        if (report.chosen.empty() && close(row->instability.lower, best_instability)) {
            report.chosen = row->id;
        }
    }
}

SelectionReport select_model(const std::vector<CandidateSpec>& candidates, const Dataset& ds,
                             double sigma_sq) {
    if (sigma_sq < 0.0) {
        throw InvalidArgumentError("sigma_sq must be non-negative");
    }
    if (candidates.empty()) {
        throw InvalidArgumentError("no fittable candidates");
    }
    const double sigma = std::sqrt(sigma_sq);
    const int n = ds.n();

    SelectionReport report;
    report.sigma_sq = sigma_sq;
    for (const auto& cand : candidates) {
        SelectionRow row;
        row.id = cand.id();
        if (cand.family == CandidateSpec::Family::linear) {
            const std::vector<double> x0 = ds.x.column(0);
            const LinearModel model = fit_polynomial(x0, {cand.order, 0}, ds.y);
            row.sse = training_error(model, ds.x, ds.y).sse;
            const double inst = analytic_instability_sq(sigma, cand.order);
            row.instability = {inst, inst};
            row.instability_coeff_lower = 2.0 * cand.order;
            row.instability_coeff_upper = row.instability_coeff_lower;
            if (sigma_sq > 0.0) {
                row.aic = aic_linear(row.sse, sigma, n, cand.order);
            }
        } else {
            IblModel model{ds, cand.order, cand.weighting, Similarity::overlap};
            row.sse = training_error_ibl(model, ds).sse;
            row.instability = analytic_instability_sq_ibl(sigma, n, cand.order, cand.weighting);
            row.instability_coeff_lower = 2.0 * n / cand.order;
            row.instability_coeff_upper =
                cand.weighting == Weighting::uniform ? row.instability_coeff_lower : 2.0 * n;
        }
        row.cvc_lower = row.sse + row.instability.lower;
        row.cvc_upper = row.sse + row.instability.upper;
        report.rows.push_back(std::move(row));
    }
    choose_from_rows(report);
    return report;
}

std::string selection_to_json(const SelectionReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json j{
            {"id", row.id},
            {"sse", row.sse},
            {"instability_sq",
             {{"lower", row.instability.lower},
              {"upper", row.instability.upper},
              {"exact", row.instability.is_exact()},
              {"coeff_lower", row.instability_coeff_lower},
              {"coeff_upper", row.instability_coeff_upper}}},
            {"cvc", {{"lower", row.cvc_lower}, {"upper", row.cvc_upper}}},
        };
        if (row.aic) {
            j["aic"] = *row.aic;
        } else {
            j["aic"] = nullptr;
        }
        rows.push_back(std::move(j));
    }
    nlohmann::json out{
        {"sigma_sq", report.sigma_sq},
        {"chosen", report.chosen},
        {"tied", report.tied},
        {"rows", rows},
    };
    return out.dump(2);
}

namespace {

std::string format_interval(double lo, double hi) {
    char buf[64];
    if (lo == hi) {
        std::snprintf(buf, sizeof(buf), "%11.4f", lo);
    } else {
        std::snprintf(buf, sizeof(buf), "[%.4f, %.4f]", lo, hi);
    }
    return buf;
}

}  // namespace

std::string selection_to_csv(const SelectionReport& report) {
    std::ostringstream os;
    os << "model,sse,instability_sq_lower,instability_sq_upper,cvc_lower,cvc_upper,aic,"
          "chosen\n";
    char buf[64];
    for (const auto& row : report.rows) {
        os << row.id;
        for (const double v : {row.sse, row.instability.lower, row.instability.upper,
                               row.cvc_lower, row.cvc_upper}) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        if (row.aic) {
            std::snprintf(buf, sizeof(buf), ",%.17g", *row.aic);
            os << buf;
        } else {
            os << ",";
        }
        os << "," << (row.id == report.chosen ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string selection_to_table(const SelectionReport& report) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-20s %10s %18s %20s %12s\n", "model", "sse",
                  "E(instability^2)", "cvc", "aic");
    os << buf;
    for (const auto& row : report.rows) {
        std::string aic = "-";
        if (row.aic) {
            std::snprintf(buf, sizeof(buf), "%.4f", *row.aic);
            aic = buf;
        }
        std::snprintf(buf, sizeof(buf), "%-20s %10.4f %18s %20s %12s%s\n", row.id.c_str(),
                      row.sse, format_interval(row.instability.lower, row.instability.upper).c_str(),
                      format_interval(row.cvc_lower, row.cvc_upper).c_str(), aic.c_str(),
                      row.id == report.chosen ? "  <- chosen" : "");
        os << buf;
    }
    os << "sigma^2 = " << report.sigma_sq << ", chosen: " << report.chosen;
    if (report.tied.size() > 1) {
        os << " (tied:";
        for (const auto& id : report.tied) {
            os << " " << id;
        }
        os << ")";
    }
    os << "\n";
    return os.str();
}

}  // namespace cverr
