#include "cverr/stats.hpp"

#include <cmath>

namespace cverr {

MeanSe mean_se(std::span<const double> values) {
    MeanSe out;
    const size_t n = values.size();
    if (n == 0) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    out.mean = sum / static_cast<double>(n);
    if (n < 2) {
        return out;
    }
    double ss = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        ss += d * d;
    }
    const double variance = ss / static_cast<double>(n - 1);
    out.se = std::sqrt(variance / static_cast<double>(n));
    return out;
}

}  // namespace cverr
