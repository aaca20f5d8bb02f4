#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cverr/blackbox.hpp"
#include "cverr/ibl.hpp"
#include "cverr/matrix.hpp"
#include "cverr/parallel.hpp"
#include "cverr/rng.hpp"
#include "cverr/stats.hpp"

namespace cverr {

// Shared setup for the statistical checks: a known box, fixed inputs, a
// noise level, and the replication budget.
struct HarnessConfig {
    BlackBox box;
    Matrix inputs;  // n x box.input_dim, held constant across trials
    NoiseSpec noise;
    int trials = 10000;
    std::uint64_t seed = 0;
    ExecutionMode mode = ExecutionMode::parallel;
};

// A named side condition verified during a check (exact-zero identities,
// per-trial inequalities, aggregate bounds).
struct CheckCondition {
    std::string name;
    double observed = 0.0;
    double target = 0.0;
    bool pass = false;
};

// Result of one statistical check: the analytic value (or bound) against the
// empirical estimate, with the pass criterion
//   |empirical - analytic| <= max(3 * standard error, 5% of analytic)
// for equalities, and the same slack on the bound direction for inequalities.
struct TheoremCheck {
    std::string id;
    std::string description;
    std::string config;
    double analytic = 0.0;
    double empirical = 0.0;
    double standard_error = 0.0;
    int trials = 0;
    bool pass = false;
    std::vector<CheckCondition> conditions;
};

/// Model fixed at the true deterministic map: instability is identically zero
/// and the mean squared cross-validation error equals sigma^2 n.
TheoremCheck check_theorem2(const HarnessConfig& cfg);

/// Memorizing model (fitted values = training outputs): training error is
/// identically zero and the mean squared cross-validation error is 2 sigma^2 n.
TheoremCheck check_theorem3(const HarnessConfig& cfg);

/// Least squares on a polynomial design with `terms` columns: mean squared
/// instability equals 2 sigma^2 r.
TheoremCheck check_theorem6(const HarnessConfig& cfg, int terms);

/// Least squares: squared cross-validation error splits exactly into
/// squared training error plus squared instability, per trial and on average.
TheoremCheck check_theorem7(const HarnessConfig& cfg, int terms);

/// Least squares: mean squared cross-validation error is at least 2 sigma^2 r.
TheoremCheck check_theorem8(const HarnessConfig& cfg, int terms);

/// Weighted k-NN: uniform weights give mean squared instability exactly
/// 2 sigma^2 n / k; similarity-proportional weights stay within
/// [2 sigma^2 n / k, 2 sigma^2 n].
TheoremCheck check_theorem10(const HarnessConfig& cfg, int k, Weighting weighting);

/// 1-NN over a threshold-reduced instance store: mean squared instability is
/// 2 sigma^2 n regardless of how many rows the reduction retains.
TheoremCheck check_theorem11(const HarnessConfig& cfg, double similarity_threshold);

// Distribution of the angle between the training-error and instability
// vectors of weighted k-NN. Reported descriptively, never as pass/fail.
struct AngleDiagnostic {
    double mean_cos = 0.0;
    double se_cos = 0.0;
    double mean_gap = 0.0;  // ||combined||^2 - (||train||^2 + ||instability||^2)
    std::vector<int> histogram;  // angle in [0, pi], kAngleBins equal bins
    int excluded = 0;            // trials with a zero-length error vector
    int trials = 0;
};

inline constexpr int kAngleBins = 12;

AngleDiagnostic angle_diagnostic_m2(const HarnessConfig& cfg, int k);

// Which checks a suite run includes.
struct SuiteSelection {
    bool t2 = true, t3 = true, t6 = true, t7 = true, t8 = true, t10 = true, t11 = true;
    bool angle = true;
};

struct SuiteResult {
    std::vector<TheoremCheck> checks;
    AngleDiagnostic angle;
    bool has_angle = false;
    bool all_pass() const;
};

/// Runs the configured subset of checks on one configuration. The equality
/// checks for least-squares instability run under all three standardized
/// noise families to exhibit that the results do not depend on the
/// distribution.
SuiteResult run_suite(const HarnessConfig& cfg, const SuiteSelection& sel);

std::string suite_to_json(const SuiteResult& result);
std::string suite_to_table(const SuiteResult& result);

}  // namespace cverr
