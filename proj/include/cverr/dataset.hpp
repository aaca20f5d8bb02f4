#pragma once

#include <string>
#include <vector>

#include "cverr/matrix.hpp"

namespace cverr {

// A training set: n input rows and the n observed outputs.
struct Dataset {
    Matrix x;               // n x r inputs
    std::vector<double> y;  // n outputs

    int n() const { return x.rows; }
    int input_dim() const { return x.cols; }
};

// Residuals of a fitted model on a dataset, with both the squared norm and
// the norm (reports use one or the other depending on context).
struct TrainingError {
    std::vector<double> residuals;
    double sse = 0.0;   // ||residuals||^2
    double norm = 0.0;  // ||residuals||
};

TrainingError summarize_residuals(std::vector<double> residuals);

/// CSV with a header row "x1,...,xr,y"; one dataset row per line.
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& ds);

/// The built-in four-point demonstration set used by the `example` command.
Dataset demo_training_set();

}  // namespace cverr
