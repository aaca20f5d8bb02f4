#include "cverr/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cverr/errors.hpp"

namespace cverr {

TrainingError summarize_residuals(std::vector<double> residuals) {
    TrainingError te;
    te.sse = norm_sq(residuals);
    te.norm = std::sqrt(te.sse);
    te.residuals = std::move(residuals);
    return te;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_number(const std::string& token, int line_no) {
    try {
        size_t used = 0;
        const double v = std::stod(token, &used);
        // allow trailing whitespace only
        for (size_t i = used; i < token.size(); ++i) {
            if (!std::isspace(static_cast<unsigned char>(token[i]))) {
                throw std::invalid_argument("trailing characters");
            }
        }
        if (!std::isfinite(v)) {
            throw std::invalid_argument("not finite");
        }
        return v;
    } catch (const std::exception&) {
        throw DataFormatError("line " + std::to_string(line_no) + ": bad numeric field '" +
                              token + "'");
    }
}

}  // namespace

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataFormatError("cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataFormatError("'" + path + "' is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    const auto header = split_line(line);
    if (header.size() < 2 || header.back() != "y") {
        throw DataFormatError("header must be x1,...,xr,y");
    }
    const int r = static_cast<int>(header.size()) - 1;

    std::vector<double> entries;
    std::vector<double> y;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split_line(line);
        if (static_cast<int>(fields.size()) != r + 1) {
            throw DataFormatError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(r + 1) + " fields, got " +
                                  std::to_string(fields.size()));
        }
        for (int j = 0; j < r; ++j) {
            entries.push_back(parse_number(fields[j], line_no));
        }
        y.push_back(parse_number(fields[r], line_no));
    }
    if (y.empty()) {
        throw DataFormatError("'" + path + "' has no data rows");
    }
    return {Matrix(static_cast<int>(y.size()), r, std::move(entries)), std::move(y)};
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) {
        throw DataFormatError("cannot write '" + path + "'");
    }
    for (int j = 0; j < ds.input_dim(); ++j) {
        out << "x" << (j + 1) << ",";
    }
    out << "y\n";
    char buf[32];
    for (int i = 0; i < ds.n(); ++i) {
        for (int j = 0; j < ds.input_dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.x(i, j));
            out << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", ds.y[i]);
        out << buf << "\n";
    }
    if (!out) {
        throw DataFormatError("write to '" + path + "' failed");
    }
}

Dataset demo_training_set() {
    return {Matrix(4, 1, {0.20, 0.35, 0.60, 0.80}), {0.15, 0.85, 0.55, 0.75}};
}

}  // namespace cverr
