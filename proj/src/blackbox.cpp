#include "cverr/blackbox.hpp"

#include <cmath>
#include <numbers>

#include "cverr/errors.hpp"

namespace cverr {

namespace {

std::vector<double> parse_coefficients(std::string_view list) {
    std::vector<double> coeffs;
    size_t pos = 0;
    while (pos <= list.size()) {
        const size_t comma = list.find(',', pos);
        const std::string_view token =
            list.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                             : comma - pos);
        try {
            size_t used = 0;
            const double v = std::stod(std::string(token), &used);
            if (used != token.size()) {
                throw std::invalid_argument("trailing characters");
            }
            coeffs.push_back(v);
        } catch (const std::exception&) {
            throw InvalidArgumentError("bad polynomial coefficient: '" + std::string(token) +
                                       "'");
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (coeffs.empty()) {
        throw InvalidArgumentError("poly black box needs at least one coefficient");
    }
    return coeffs;
}

}  // namespace

BlackBox make_blackbox(std::string_view spec, int input_dim) {
    if (spec == "zero") {
        return {[](std::span<const double>) { return 0.0; }, input_dim, "zero"};
    }
    if (spec == "sin") {
        return {[](std::span<const double> v) { return std::sin(2.0 * std::numbers::pi * v[0]); },
                1, "sin"};
    }
    if (spec.substr(0, 5) == "poly:") {
        auto coeffs = parse_coefficients(spec.substr(5));
        return {[coeffs](std::span<const double> v) {
                    // Horner evaluation in the first input
                    double acc = 0.0;
                    for (size_t i = coeffs.size(); i-- > 0;) {
                        acc = acc * v[0] + coeffs[i];
                    }
                    return acc;
                },
                1, std::string(spec)};
    }
    throw InvalidArgumentError("unknown black box: '" + std::string(spec) +
                               "' (expected zero, sin, or poly:c0,c1,...)");
}

std::vector<double> evaluate(const BlackBox& box, const Matrix& x) {
    if (x.cols != box.input_dim) {
        throw DimensionError("input column count does not match the box input dimension");
    }
    std::vector<double> out(x.rows);
    for (int i = 0; i < x.rows; ++i) {
        out[i] = box.f(x.row(i));
    }
    return out;
}

std::vector<double> generate_outputs(const BlackBox& box, const Matrix& x,
                                     const NoiseSpec& noise, std::uint64_t seed) {
    if (noise.sigma < 0.0) {
        throw InvalidArgumentError("sigma must be non-negative");
    }
    std::vector<double> y = evaluate(box, x);
    if (noise.sigma > 0.0) {
        StandardizedSampler sampler(noise.distribution, seed);
        for (double& yi : y) {
            yi += noise.sigma * sampler.next();
        }
    }
    return y;
}

std::vector<std::vector<double>> replicate_outputs(const BlackBox& box, const Matrix& x,
                                                   const NoiseSpec& noise, int m,
                                                   std::uint64_t seed) {
    if (m < 1) {
        throw InvalidArgumentError("replicate count must be at least 1");
    }
    std::vector<std::vector<double>> replicates(m);
    for (int k = 0; k < m; ++k) {
        replicates[k] = generate_outputs(box, x, noise, derive_seed(seed, k));
    }
    return replicates;
}

std::vector<double> average_outputs(const std::vector<std::vector<double>>& replicates) {
    if (replicates.empty()) {
        throw InvalidArgumentError("average_outputs: empty replicate sequence");
    }
    const size_t n = replicates[0].size();
    std::vector<double> avg(n, 0.0);
    for (const auto& rep : replicates) {
        if (rep.size() != n) {
            throw DimensionError("average_outputs: ragged replicate lengths");
        }
        for (size_t i = 0; i < n; ++i) {
            avg[i] += rep[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(replicates.size());
    for (double& v : avg) {
        v *= inv;
    }
    return avg;
}

}  // namespace cverr
