#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace scsr {

struct Dataset {
    Eigen::MatrixXd X; // one row per observation
    Eigen::ArrayXd y;
    std::vector<std::string> columns; // input variable names
    std::string target;
    std::string provenance;

    [[nodiscard]] Eigen::Index rows() const noexcept { return X.rows(); }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(X.cols()); }
};

/// One row of a convergence trace.
struct ConvergenceRow {
    int generation{0};
    std::size_t evaluations{0};
    double best_nmse{1.0};
    double median_nmse{1.0};
};

using ConvergenceLog = std::vector<ConvergenceRow>;

} // namespace scsr
