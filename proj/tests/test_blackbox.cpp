#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cverr/blackbox.hpp"
#include "cverr/errors.hpp"
#include "cverr/rng.hpp"

using namespace cverr;

namespace {

Matrix grid(int n) {
    Matrix x(n, 1);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = (i + 0.5) / n;
    }
    return x;
}

}  // namespace

TEST_CASE("built-in boxes evaluate as specified") {
    const BlackBox zero = make_blackbox("zero");
    const BlackBox poly = make_blackbox("poly:1,-2,0.5");
    const BlackBox sine = make_blackbox("sin");
    const double v[1] = {0.25};
    CHECK(zero.f(v) == 0.0);
    CHECK(poly.f(v) == doctest::Approx(1.0 - 2.0 * 0.25 + 0.5 * 0.25 * 0.25).epsilon(1e-15));
    CHECK(sine.f(v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_blackbox("nope"), InvalidArgumentError);
    CHECK_THROWS_AS(make_blackbox("poly:1,zzz"), InvalidArgumentError);
}

TEST_CASE("zero noise returns the deterministic outputs exactly") {
    const BlackBox poly = make_blackbox("poly:0.5,1");
    const Matrix x = grid(7);
    const std::vector<double> y =
        generate_outputs(poly, x, {NoiseDistribution::standard_normal, 0.0}, 123);
    const std::vector<double> truth = evaluate(poly, x);
    CHECK(y == truth);
}

TEST_CASE("single output equals truth plus the first scaled draw") {
    const BlackBox box = make_blackbox("poly:0,1");  // identity in x
    const Matrix x(1, 1, {0.5});
    const std::uint64_t seed = 987;
    const std::vector<double> y =
        generate_outputs(box, x, {NoiseDistribution::standard_normal, 0.1}, seed);
    StandardizedSampler sampler(NoiseDistribution::standard_normal, seed);
    CHECK(y[0] == 0.5 + 0.1 * sampler.next());
}

TEST_CASE("dimension mismatch between inputs and box is rejected") {
    const BlackBox zero = make_blackbox("zero", 2);
    CHECK_THROWS_AS(generate_outputs(zero, grid(4), {NoiseDistribution::uniform, 1.0}, 0),
                    DimensionError);
}

TEST_CASE("same seed reproduces the same replicate sequence") {
    const BlackBox box = make_blackbox("sin");
    const Matrix x = grid(16);
    const NoiseSpec noise{NoiseDistribution::standard_normal, 0.3};
    const auto a = replicate_outputs(box, x, noise, 5, 2024);
    const auto b = replicate_outputs(box, x, noise, 5, 2024);
    CHECK(a == b);
    const auto c = replicate_outputs(box, x, noise, 5, 2025);
    CHECK(a != c);
}

TEST_CASE("replicate 0 matches generate_outputs with the derived seed") {
    const BlackBox box = make_blackbox("poly:1,1");
    const Matrix x = grid(6);
    const NoiseSpec noise{NoiseDistribution::uniform, 0.2};
    const auto reps = replicate_outputs(box, x, noise, 1, 55);
    REQUIRE(reps.size() == 1);
    CHECK(reps[0] == generate_outputs(box, x, noise, derive_seed(55, 0)));
}

TEST_CASE("two replicates with continuous noise differ") {
    const BlackBox box = make_blackbox("zero");
    const Matrix x = grid(8);
    const auto reps =
        replicate_outputs(box, x, {NoiseDistribution::standard_normal, 1.0}, 2, 3);
    CHECK(reps[0] != reps[1]);
}

TEST_CASE("replicate count must be positive") {
    const BlackBox box = make_blackbox("zero");
    CHECK_THROWS_AS(
        replicate_outputs(box, grid(3), {NoiseDistribution::uniform, 1.0}, 0, 1),
        InvalidArgumentError);
}

TEST_CASE("average_outputs is the component-wise mean") {
    CHECK(average_outputs({{1.0, 2.0}, {3.0, 4.0}}) == std::vector<double>{2.0, 3.0});
    CHECK(average_outputs({{5.0, -1.0}}) == std::vector<double>{5.0, -1.0});
    CHECK_THROWS_AS(average_outputs({}), InvalidArgumentError);
    CHECK_THROWS_AS(average_outputs({{1.0}, {1.0, 2.0}}), DimensionError);
}

TEST_CASE("large-sample mean and variance of generated noise") {
    const BlackBox zero = make_blackbox("zero");
    Matrix x(100000, 1);
    for (int i = 0; i < x.rows; ++i) {
        x(i, 0) = 0.0;
    }
    const std::vector<double> y =
        generate_outputs(zero, x, {NoiseDistribution::standard_normal, 1.0}, 71);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= y.size();
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= (y.size() - 1);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("every distribution is standardized over a million draws") {
    for (const NoiseDistribution d : {NoiseDistribution::standard_normal,
                                      NoiseDistribution::uniform,
                                      NoiseDistribution::rademacher}) {
        StandardizedSampler sampler(d, 90210);
        const int n = 1000000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z = sampler.next();
            sum += z;
            sum_sq += z * z;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        CAPTURE(to_string(d));
        CHECK(std::abs(mean) < 0.01);
        CHECK(std::abs(var - 1.0) < 0.01);
    }
}

TEST_CASE("averaged replicates converge to the deterministic outputs") {
    const BlackBox box = make_blackbox("poly:0,0,1");  // x^2
    const Matrix x = grid(4);
    const std::vector<double> truth = evaluate(box, x);
    const NoiseSpec noise{NoiseDistribution::standard_normal, 0.5};

    const auto max_err = [&](int m) {
        const std::vector<double> avg = average_outputs(replicate_outputs(box, x, noise, m, 8));
        double e = 0.0;
        for (size_t i = 0; i < avg.size(); ++i) {
            e = std::max(e, std::abs(avg[i] - truth[i]));
        }
        return e;
    };

    const double err_1e4 = max_err(10000);
    // per-component bound from the scale of the averaged noise
    CHECK(err_1e4 <= 3.0 * 0.5 / std::sqrt(10000.0));
    // root-m decay between m = 100 and m = 10000
    const double err_1e2 = max_err(100);
    CHECK(err_1e4 < err_1e2);
    CHECK(err_1e4 < 0.4 * err_1e2);
}

TEST_CASE("averaging many unit-noise replicates of a constant recovers it") {
    const BlackBox box = make_blackbox("poly:0.7");
    const Matrix x = grid(5);
    const auto avg = average_outputs(
        replicate_outputs(box, x, {NoiseDistribution::uniform, 1.0}, 10000, 99));
    for (double v : avg) {
        CHECK(std::abs(v - 0.7) < 0.05);
    }
}

TEST_CASE("negative sigma is rejected") {
    const BlackBox box = make_blackbox("zero");
    CHECK_THROWS_AS(
        generate_outputs(box, grid(2), {NoiseDistribution::uniform, -1.0}, 0),
        InvalidArgumentError);
}

TEST_CASE("distribution names round-trip") {
    CHECK(parse_distribution("normal") == NoiseDistribution::standard_normal);
    CHECK(parse_distribution("standard-normal") == NoiseDistribution::standard_normal);
    CHECK(parse_distribution("uniform") == NoiseDistribution::uniform);
    CHECK(parse_distribution("rademacher") == NoiseDistribution::rademacher);
    CHECK_THROWS_AS(parse_distribution("cauchy"), InvalidArgumentError);
}
