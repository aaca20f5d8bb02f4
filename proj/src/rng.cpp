#include "cverr/rng.hpp"

#include <cmath>
#include <numbers>

#include "cverr/errors.hpp"

namespace cverr {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over (master, index); distinct indices give
    // well-separated streams even for adjacent master seeds.
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

NoiseDistribution parse_distribution(std::string_view name) {
    if (name == "normal" || name == "standard-normal" || name == "gaussian") {
        return NoiseDistribution::standard_normal;
    }
    if (name == "uniform") {
        return NoiseDistribution::uniform;
    }
    if (name == "rademacher") {
        return NoiseDistribution::rademacher;
    }
    throw InvalidArgumentError("unknown noise distribution: " + std::string(name));
}

std::string to_string(NoiseDistribution d) {
    switch (d) {
        case NoiseDistribution::standard_normal: return "normal";
        case NoiseDistribution::uniform: return "uniform";
        case NoiseDistribution::rademacher: return "rademacher";
    }
    return "?";
}

double StandardizedSampler::next_u01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StandardizedSampler::next_u01_open0() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double StandardizedSampler::next() {
    switch (dist_) {
        case NoiseDistribution::standard_normal: {
            if (has_spare_) {
                has_spare_ = false;
                return spare_;
            }
            // Box-Muller; u1 is kept away from zero for the logarithm.
            const double u1 = next_u01_open0();
            const double u2 = next_u01();
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            spare_ = radius * std::sin(angle);
            has_spare_ = true;
            return radius * std::cos(angle);
        }
        case NoiseDistribution::uniform:
            // half-width sqrt(3) gives unit variance
            return (2.0 * next_u01() - 1.0) * std::numbers::sqrt3;
        case NoiseDistribution::rademacher:
            return (engine_() >> 63) ? 1.0 : -1.0;
    }
    return 0.0;
}

}  // namespace cverr
