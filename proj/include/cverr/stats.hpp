#pragma once

#include <span>

namespace cverr {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
};

MeanSe mean_se(std::span<const double> values);

}  // namespace cverr
