#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cverr/blackbox.hpp"
#include "cverr/errors.hpp"
#include "cverr/harness.hpp"

#include "json.hpp"

using namespace cverr;

namespace {

HarnessConfig quick_config(int n = 20, double sigma = 1.0, int trials = 4000,
                           NoiseDistribution dist = NoiseDistribution::standard_normal) {
    HarnessConfig cfg;
    cfg.box = make_blackbox("poly:0.2,0.6,-0.3");
    Matrix x(n, 1);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = (i + 0.5) / n;
    }
    cfg.inputs = x;
    cfg.noise = {dist, sigma};
    cfg.trials = trials;
    cfg.seed = 424242;
    return cfg;
}

bool condition_pass(const TheoremCheck& check, const std::string& name) {
    for (const auto& c : check.conditions) {
        if (c.name == name) {
            return c.pass;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("fixed-truth model: cv error level and exact stability") {
    const TheoremCheck check = check_theorem2(quick_config());
    CHECK(check.pass);
    CHECK(check.analytic == 20.0);
    CHECK(std::abs(check.empirical - 20.0) <= 0.05 * 20.0);
    CHECK(condition_pass(check, "instability_exactly_zero"));
    CHECK(condition_pass(check, "mean_norm_upper_bound"));
    CHECK(condition_pass(check, "triangle_per_trial"));
    CHECK(condition_pass(check, "lemma1_cross_validation"));
}

TEST_CASE("fixed-truth model with zero noise is error-free") {
    const TheoremCheck check = check_theorem2(quick_config(10, 0.0, 50));
    CHECK(check.pass);
    CHECK(check.empirical == 0.0);
}

TEST_CASE("memorizer: doubled cv error level and exact recall") {
    const TheoremCheck check = check_theorem3(quick_config());
    CHECK(check.pass);
    CHECK(check.analytic == 40.0);
    CHECK(condition_pass(check, "training_error_exactly_zero"));
    CHECK(condition_pass(check, "instability_norm_equals_cv_norm"));
}

TEST_CASE("memorizer doubles the fixed-truth cv level") {
    const TheoremCheck t2 = check_theorem2(quick_config(20, 1.0, 10000));
    const TheoremCheck t3 = check_theorem3(quick_config(20, 1.0, 10000));
    CHECK(t3.empirical / t2.empirical == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("least-squares instability level for every noise family") {
    for (const NoiseDistribution d : {NoiseDistribution::standard_normal,
                                      NoiseDistribution::uniform,
                                      NoiseDistribution::rademacher}) {
        const TheoremCheck check = check_theorem6(quick_config(25, 0.5, 4000, d), 3);
        CAPTURE(to_string(d));
        CHECK(check.pass);
        CHECK(check.analytic == doctest::Approx(1.5).epsilon(1e-15));
    }
}

TEST_CASE("square design instability equals the memorizer level") {
    const int n = 6;
    const TheoremCheck t6 = check_theorem6(quick_config(n, 1.0, 6000), n);
    CHECK(t6.pass);
    CHECK(t6.analytic == 2.0 * n);
}

TEST_CASE("least-squares split holds per trial and on average") {
    const TheoremCheck check = check_theorem7(quick_config(30, 0.3, 3000), 2);
    CHECK(check.pass);
    CHECK(condition_pass(check, "pythagoras_per_trial"));
    CHECK(condition_pass(check, "residual_orthogonal_to_instability"));
}

TEST_CASE("least-squares split with zero noise collapses") {
    const TheoremCheck check = check_theorem7(quick_config(10, 0.0, 20), 2);
    CHECK(check.pass);
}

TEST_CASE("cv error lower bound, strict under misspecification") {
    HarnessConfig cfg = quick_config(24, 0.25, 4000);
    cfg.box = make_blackbox("sin");
    const TheoremCheck check = check_theorem8(cfg, 2);
    CHECK(check.pass);
    // the curved truth leaves residual bias, so the inequality is strict
    CHECK(check.empirical > check.analytic + 6.0 * check.standard_error);
}

TEST_CASE("uniform k-NN instability equality") {
    const TheoremCheck check = check_theorem10(quick_config(24, 1.0, 4000), 6,
                                               Weighting::uniform);
    CHECK(check.pass);
    CHECK(check.analytic == 8.0);
    CHECK(condition_pass(check, "weights_on_simplex"));
    CHECK(condition_pass(check, "weight_concentration_in_range"));
}

TEST_CASE("one-neighbor instability matches the memorizer level") {
    const TheoremCheck check =
        check_theorem10(quick_config(12, 1.0, 4000), 1, Weighting::uniform);
    CHECK(check.pass);
    CHECK(check.analytic == 24.0);
}

TEST_CASE("similarity-weighted k-NN stays within the bracket") {
    const TheoremCheck check = check_theorem10(quick_config(24, 1.0, 4000), 6,
                                               Weighting::similarity_proportional);
    CHECK(check.pass);
    CHECK(condition_pass(check, "at_least_most_stable_bound"));
    CHECK(condition_pass(check, "at_most_least_stable_bound"));
}

TEST_CASE("reduced-store instability is independent of the retained count") {
    const HarnessConfig cfg = quick_config(16, 0.8, 4000);
    // thresholds that keep everything, something, and one row
    for (const double threshold : {2.0, 0.6, -1.0}) {
        const TheoremCheck check = check_theorem11(cfg, threshold);
        CAPTURE(threshold);
        CHECK(check.pass);
        CHECK(check.analytic == doctest::Approx(2.0 * 0.64 * 16.0).epsilon(1e-12));
    }
}

TEST_CASE("reduced-store retained counts land where intended") {
    const HarnessConfig cfg = quick_config(16, 0.8, 10);
    const TheoremCheck all = check_theorem11(cfg, 2.0);
    CHECK(all.config.find("retained=16") != std::string::npos);
    const TheoremCheck one = check_theorem11(cfg, -1.0);
    CHECK(one.config.find("retained=1") != std::string::npos);
}

TEST_CASE("angle diagnostic reports and excludes degenerate trials") {
    const AngleDiagnostic diag = angle_diagnostic_m2(quick_config(16, 0.5, 2000), 4);
    CHECK(diag.trials == 2000);
    int total = diag.excluded;
    for (int c : diag.histogram) {
        CHECK(c >= 0);
        total += c;
    }
    CHECK(total == 2000);
    CHECK(std::abs(diag.mean_cos) <= 1.0);
}

TEST_CASE("angle diagnostic excludes every one-neighbor trial") {
    // k = 1 recalls the training outputs, so the training error vanishes
    const AngleDiagnostic diag = angle_diagnostic_m2(quick_config(8, 0.5, 200), 1);
    CHECK(diag.excluded == 200);
}

TEST_CASE("equality checks hold for every noise family at full budget") {
    for (const NoiseDistribution d :
         {NoiseDistribution::uniform, NoiseDistribution::rademacher}) {
        const HarnessConfig cfg = quick_config(16, 0.8, 10000, d);
        CAPTURE(to_string(d));
        CHECK(check_theorem2(cfg).pass);
        CHECK(check_theorem3(cfg).pass);
        CHECK(check_theorem10(cfg, 4, Weighting::uniform).pass);
        CHECK(check_theorem11(cfg, 0.6).pass);
    }
}

TEST_CASE("identical seeds reproduce identical check numerics") {
    const TheoremCheck a = check_theorem6(quick_config(15, 0.5, 1500), 3);
    const TheoremCheck b = check_theorem6(quick_config(15, 0.5, 1500), 3);
    CHECK(a.empirical == b.empirical);
    CHECK(a.standard_error == b.standard_error);
}

TEST_CASE("serial and parallel suites are bit-identical") {
    HarnessConfig serial = quick_config(12, 0.5, 1000);
    serial.mode = ExecutionMode::serial;
    HarnessConfig parallel = quick_config(12, 0.5, 1000);
    parallel.mode = ExecutionMode::parallel;
    for (const auto checker : {check_theorem2, check_theorem3}) {
        const TheoremCheck a = checker(serial);
        const TheoremCheck b = checker(parallel);
        CHECK(a.empirical == b.empirical);
        CHECK(a.standard_error == b.standard_error);
        CHECK(a.analytic == b.analytic);
    }
    const TheoremCheck a7 = check_theorem7(serial, 2);
    const TheoremCheck b7 = check_theorem7(parallel, 2);
    CHECK(a7.empirical == b7.empirical);
    CHECK(a7.standard_error == b7.standard_error);
    const TheoremCheck a6 = check_theorem6(serial, 3);
    const TheoremCheck b6 = check_theorem6(parallel, 3);
    CHECK(a6.empirical == b6.empirical);
    const TheoremCheck a10 = check_theorem10(serial, 4, Weighting::uniform);
    const TheoremCheck b10 = check_theorem10(parallel, 4, Weighting::uniform);
    CHECK(a10.empirical == b10.empirical);
}

TEST_CASE("the default suite passes end to end and serializes") {
    HarnessConfig cfg = quick_config(24, 0.5, 3000);
    const SuiteResult result = run_suite(cfg, SuiteSelection{});
    CHECK(result.all_pass());
    CHECK(result.has_angle);
    // T2, T3, T6 x3 distributions, T7, T8, T10 x2 weightings, T11 x3 thresholds
    CHECK(result.checks.size() == 12);

    const auto j = nlohmann::json::parse(suite_to_json(result));
    CHECK(j["all_pass"].get<bool>());
    CHECK(j["checks"].size() == result.checks.size());
    CHECK(j.contains("angle_diagnostic"));
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("id"));
        CHECK(c.contains("analytic"));
        CHECK(c.contains("empirical"));
        CHECK(c.contains("standard_error"));
        CHECK(c.contains("pass"));
        CHECK(c.contains("conditions"));
    }

    const std::string table = suite_to_table(result);
    CHECK(table.find("[PASS]") != std::string::npos);
    CHECK(table.find("all checks passed") != std::string::npos);
}

TEST_CASE("undersampled runs are reported honestly") {
    HarnessConfig cfg = quick_config(20, 1.0, 2);
    SuiteSelection sel;
    sel.t3 = sel.t6 = sel.t7 = sel.t8 = sel.t10 = sel.t11 = sel.angle = false;
    const SuiteResult result = run_suite(cfg, sel);
    REQUIRE(result.checks.size() == 1);
    // with two trials the verdict may go either way; it must simply be
    // consistent with the recorded criterion
    const TheoremCheck& c = result.checks[0];
    const double tol = std::max(3.0 * c.standard_error, 0.05 * std::abs(c.analytic));
    CHECK(c.pass == (std::abs(c.empirical - c.analytic) <= tol));
}

TEST_CASE("trials must be positive") {
    HarnessConfig cfg = quick_config();
    cfg.trials = 0;
    CHECK_THROWS_AS(check_theorem2(cfg), InvalidArgumentError);
}
