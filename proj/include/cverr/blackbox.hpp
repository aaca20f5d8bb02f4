#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cverr/matrix.hpp"
#include "cverr/rng.hpp"

namespace cverr {

// A simulated experiment: a deterministic map from inputs to one output,
// observed through additive scaled noise.
struct BlackBox {
    std::function<double(std::span<const double>)> f;
    int input_dim = 1;
    std::string name;
};

/// Built-in boxes: "zero", "poly:c0,c1,...", "sin" (sin of 2*pi*x).
/// input_dim applies to "zero" only; the others are one-dimensional.
BlackBox make_blackbox(std::string_view spec, int input_dim = 1);

/// f applied to every row of x.
std::vector<double> evaluate(const BlackBox& box, const Matrix& x);

/// One set of n observed outputs: y_i = f(row_i) + sigma * z_i, with the z_i
/// drawn from the seeded standardized stream.
std::vector<double> generate_outputs(const BlackBox& box, const Matrix& x,
                                     const NoiseSpec& noise, std::uint64_t seed);

/// m independent repetitions of the same n experiments, x held constant.
/// Replicate k is reproducible from (seed, k) alone.
std::vector<std::vector<double>> replicate_outputs(const BlackBox& box, const Matrix& x,
                                                   const NoiseSpec& noise, int m,
                                                   std::uint64_t seed);

/// Component-wise mean of a non-empty set of equal-length replicates.
std::vector<double> average_outputs(const std::vector<std::vector<double>>& replicates);

}  // namespace cverr
