#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cverr/dataset.hpp"
#include "cverr/errors.hpp"
#include "cverr/ibl.hpp"

using namespace cverr;

namespace {

IblModel demo_model(int k, Weighting w = Weighting::uniform) {
    return {demo_training_set(), k, w, Similarity::overlap};
}

}  // namespace

TEST_CASE("overlap similarity on scalars and vectors") {
    const std::vector<double> a{0.5};
    CHECK(similarity(a, a, Similarity::overlap) == 1.0);
    const std::vector<double> u{0.20}, v{0.35};
    CHECK(similarity(u, v, Similarity::overlap) == doctest::Approx(0.85).epsilon(1e-15));
    const std::vector<double> p{0.1, 0.9};
    CHECK(similarity(p, p, Similarity::overlap) == 2.0);
    CHECK_THROWS_AS(similarity(a, p, Similarity::overlap), DimensionError);
}

TEST_CASE("both similarity kinds are reasonable") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 1 + static_cast<int>(u(rng) * 4);
        std::vector<double> a(d), b(d);
        for (int j = 0; j < d; ++j) {
            a[j] = u(rng);
            b[j] = u(rng);
        }
        if (a == b) {
            b[0] += 0.25;
        }
        for (const Similarity kind : {Similarity::overlap, Similarity::negative_euclidean}) {
            CHECK(similarity(a, b, kind) < similarity(a, a, kind));
        }
    }
}

TEST_CASE("neighbors of 0.60 in the demo data") {
    const IblModel m = demo_model(3);
    const std::vector<double> v{0.60};
    const NeighborSet ns = nearest_neighbors(m, v, 3);
    CHECK(ns.indices == std::vector<int>{2, 3, 1});
    CHECK(ns.similarities[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ns.similarities[1] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(ns.similarities[2] == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("k equal to n returns every row") {
    const IblModel m = demo_model(4);
    const std::vector<double> v{0.5};
    const NeighborSet ns = nearest_neighbors(m, v, 4);
    CHECK(ns.indices.size() == 4);
}

TEST_CASE("a stored row is its own nearest neighbor") {
    const IblModel m = demo_model(1);
    const std::vector<double> v{0.35};
    const NeighborSet ns = nearest_neighbors(m, v, 1);
    CHECK(ns.indices == std::vector<int>{1});
}

TEST_CASE("similarity ties resolve toward the lower row index") {
    const Dataset ds{Matrix(3, 1, {0.3, 0.5, 0.7}), {1.0, 2.0, 3.0}};
    const IblModel m{ds, 3, Weighting::uniform, Similarity::overlap};
    const std::vector<double> v{0.5};
    const NeighborSet ns = nearest_neighbors(m, v, 3);
    CHECK(ns.indices == std::vector<int>{1, 0, 2});  // 0.3 and 0.7 tie at 0.8
}

TEST_CASE("k out of range is rejected") {
    const IblModel m = demo_model(1);
    const std::vector<double> v{0.5};
    CHECK_THROWS_AS(nearest_neighbors(m, v, 0), InvalidArgumentError);
    CHECK_THROWS_AS(nearest_neighbors(m, v, 5), InvalidArgumentError);
}

TEST_CASE("nearest prediction recalls stored outputs") {
    const IblModel m = demo_model(1);
    CHECK(predict_nearest(m, std::vector<double>{0.20}) == 0.15);
    CHECK(predict_nearest(m, std::vector<double>{0.55}) == 0.55);  // nearest row is 0.60
    CHECK(training_error_ibl(m, m.instances).sse == 0.0);
}

TEST_CASE("exact recall on every training row with distinct rows") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 12;
    Matrix x(n, 2);
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = u(rng);
        x(i, 1) = u(rng);
        y[i] = u(rng);
    }
    const IblModel m{{x, y}, 1, Weighting::uniform, Similarity::overlap};
    for (int i = 0; i < n; ++i) {
        CHECK(predict(m, x.row(i)) == y[i]);
    }
}

TEST_CASE("uniform two-neighbor average at 0.20") {
    const IblModel m = demo_model(2);
    CHECK(predict(m, std::vector<double>{0.20}) == doctest::Approx(0.50).epsilon(1e-15));
}

TEST_CASE("weighted prediction with k=1 equals nearest prediction") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const Weighting w : {Weighting::uniform, Weighting::similarity_proportional}) {
        const IblModel m = demo_model(1, w);
        for (int rep = 0; rep < 50; ++rep) {
            const std::vector<double> v{u(rng)};
            CHECK(predict(m, v) == predict_nearest(m, v));
        }
    }
}

TEST_CASE("full-neighborhood uniform prediction is the output mean") {
    const IblModel m = demo_model(4);
    CHECK(predict(m, std::vector<double>{0.1}) == doctest::Approx(0.575).epsilon(1e-15));
}

TEST_CASE("demo training errors for the uniform neighborhood sizes") {
    CHECK(training_error_ibl(demo_model(2), demo_model(2).instances).sse ==
          doctest::Approx(0.2650).epsilon(1e-3));
    CHECK(training_error_ibl(demo_model(3), demo_model(3).instances).sse ==
          doctest::Approx(0.2744).epsilon(1e-3));
    CHECK(training_error_ibl(demo_model(1), demo_model(1).instances).sse == 0.0);
}

TEST_CASE("reduce_instances keeps everything under a high threshold") {
    const Dataset ds = demo_training_set();
    const Dataset out = reduce_instances(ds, 0.99, Similarity::overlap);
    CHECK(out.n() == 4);
    CHECK(out.x.data == ds.x.data);
    CHECK(out.y == ds.y);
}

TEST_CASE("reduce_instances keeps only the first row under a low threshold") {
    const Dataset ds = demo_training_set();
    const Dataset out = reduce_instances(ds, -10.0, Similarity::overlap);
    CHECK(out.n() == 1);
    CHECK(out.x(0, 0) == 0.20);
    CHECK(out.y[0] == 0.15);
}

TEST_CASE("reduce_instances greedy trace on the demo data") {
    const Dataset ds = demo_training_set();
    const Dataset out = reduce_instances(ds, 0.8, Similarity::overlap);
    REQUIRE(out.n() == 3);
    CHECK(out.x(0, 0) == 0.20);
    CHECK(out.x(1, 0) == 0.60);
    CHECK(out.x(2, 0) == 0.80);
}

TEST_CASE("reduction never reads the outputs") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = 10;
    Matrix x(n, 1);
    std::vector<double> y1(n), y2(n);
    for (int i = 0; i < n; ++i) {
        x(i, 0) = u(rng);
        y1[i] = u(rng);
        y2[i] = u(rng);  // an arbitrary permutation-like re-labeling
    }
    const Dataset a = reduce_instances({x, y1}, 0.7, Similarity::overlap);
    const Dataset b = reduce_instances({x, y2}, 0.7, Similarity::overlap);
    CHECK(a.x.data == b.x.data);  // identical retained input rows
}

TEST_CASE("analytic instability for the uniform neighborhood sizes") {
    const double s = 1.3;
    const InstabilityBounds b2 = analytic_instability_sq_ibl(s, 4, 2, Weighting::uniform);
    CHECK(b2.is_exact());
    CHECK(b2.value() == 4.0 * s * s);
    const InstabilityBounds b3 = analytic_instability_sq_ibl(s, 4, 3, Weighting::uniform);
    CHECK(b3.value() == doctest::Approx(8.0 / 3.0 * s * s).epsilon(1e-15));
    const InstabilityBounds b1 = analytic_instability_sq_ibl(s, 4, 1, Weighting::uniform);
    CHECK(b1.value() == 2.0 * s * s * 4.0);
    CHECK_THROWS_AS(analytic_instability_sq_ibl(s, 4, 0, Weighting::uniform),
                    InvalidArgumentError);
    CHECK_THROWS_AS(analytic_instability_sq_ibl(s, 4, 5, Weighting::uniform),
                    InvalidArgumentError);
}

TEST_CASE("similarity-proportional weighting only brackets the instability") {
    const InstabilityBounds b =
        analytic_instability_sq_ibl(1.0, 8, 2, Weighting::similarity_proportional);
    CHECK_FALSE(b.is_exact());
    CHECK(b.lower == 8.0);
    CHECK(b.upper == 16.0);
}

TEST_CASE("reduced-store instability matches the 1-NN level") {
    const InstabilityBounds b = analytic_instability_sq_reduced(0.5, 10);
    CHECK(b.is_exact());
    CHECK(b.value() == 2.0 * 0.25 * 10.0);
}

TEST_CASE("cvc_ibl on the demo data") {
    CHECK(cvc_ibl(0.2650, 0.1, 4, 2) == doctest::Approx(0.3050).epsilon(1e-12));
    CHECK(cvc_ibl(0.321, 0.0, 4, 2) == 0.321);
    CHECK_THROWS_AS(cvc_ibl(0.1, 0.1, 4, 2, Weighting::similarity_proportional),
                    InvalidArgumentError);
}

TEST_CASE("the widest neighborhood matches the one-term regression criterion") {
    const double sigma = 0.31;
    const double ibl4 = cvc_ibl(0.2875, sigma, 4, 4);
    const double lr1 = 0.2875 + 2.0 * sigma * sigma;
    CHECK(ibl4 == doctest::Approx(lr1).epsilon(1e-15));
}

TEST_CASE("weights stay on the simplex with bounded concentration") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Dataset ds = demo_training_set();
    for (const Weighting w : {Weighting::uniform, Weighting::similarity_proportional}) {
        const IblModel m{ds, 3, w, Similarity::overlap};
        for (int rep = 0; rep < 100; ++rep) {
            const std::vector<double> v{u(rng)};
            const NeighborSet ns = nearest_neighbors(m, v, 3);
            double sum = 0.0, sum_sq = 0.0;
            for (double wi : ns.weights) {
                CHECK(wi >= 0.0);
                CHECK(wi <= 1.0);
                sum += wi;
                sum_sq += wi * wi;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            CHECK(sum_sq >= 1.0 / 3.0 - 1e-12);
            CHECK(sum_sq <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("uniform weights are exactly one over k") {
    const IblModel m = demo_model(3);
    const NeighborSet ns = nearest_neighbors(m, std::vector<double>{0.4}, 3);
    for (double w : ns.weights) {
        CHECK(w == 1.0 / 3.0);
    }
}

TEST_CASE("degenerate proportional weights fall back to uniform") {
    // coordinates differ by more than 1, so overlap similarities go negative
    const Dataset ds{Matrix(3, 1, {0.0, 5.0, 9.0}), {1.0, 2.0, 3.0}};
    const IblModel m{ds, 2, Weighting::similarity_proportional, Similarity::overlap};
    const NeighborSet ns = nearest_neighbors(m, std::vector<double>{7.0}, 2);
    CHECK(ns.uniform_fallback);
    CHECK(ns.weights[0] == 0.5);
    CHECK(ns.weights[1] == 0.5);
}

TEST_CASE("empty instance store is rejected") {
    IblModel m;
    m.instances = Dataset{};
    CHECK_THROWS_AS(predict(m, std::vector<double>{0.5}), InvalidArgumentError);
}
