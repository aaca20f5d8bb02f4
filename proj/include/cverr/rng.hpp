#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace cverr {

/// Deterministic substream derivation: stream k of a master seed.
/// Used so replicate/trial k can be generated independently of execution
/// order (parallel runs reproduce serial runs exactly).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Standardized noise families: each has mean 0 and variance 1.
enum class NoiseDistribution {
    standard_normal,
    uniform,     // uniform on [-sqrt(3), sqrt(3)]
    rademacher,  // +1 or -1 with equal probability
};

NoiseDistribution parse_distribution(std::string_view name);
std::string to_string(NoiseDistribution d);

struct NoiseSpec {
    NoiseDistribution distribution = NoiseDistribution::standard_normal;
    double sigma = 0.0;  // scale, >= 0
};

/// Draws from one standardized distribution. The mapping from engine output
/// to doubles is spelled out here (no std::*_distribution) so that streams
/// are bit-identical across standard library implementations.
class StandardizedSampler {
public:
    StandardizedSampler(NoiseDistribution distribution, std::uint64_t seed)
        : dist_(distribution), engine_(seed) {}

    double next();

private:
    double next_u01();        // [0, 1), 53-bit resolution
    double next_u01_open0();  // (0, 1]

    NoiseDistribution dist_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;  // Box-Muller produces pairs
    bool has_spare_ = false;
};

}  // namespace cverr
