#pragma once

#include <Eigen/Core>

#include "scsr/expr.hpp"

namespace scsr {

struct LMConfig {
    int max_iterations{10};
    double initial_damping{1e-3};
    double damping_up{10.0};
    double damping_down{0.1};
    double gradient_tolerance{1e-8};
    // rejected trial steps allowed within one iteration before giving up
    int max_rejections{10};
};

struct LMResult {
    Expression expression;
    double initial_sse{0.0};
    double final_sse{0.0};
    int iterations{0};
};

/// Levenberg-Marquardt fit of the parameters of `e` to (X, y). The improved
/// parameters are written back into the tree; if the fit ends worse than it
/// started, the initial parameters are kept.
LMResult optimize_parameters(Expression const& e, LMConfig const& cfg, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y);

/// Convenience wrapper returning only the updated expression.
inline Expression optimize(Expression const& e, LMConfig const& cfg, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y)
{
    return optimize_parameters(e, cfg, X, y).expression;
}

/// Jacobian of the predictions with respect to the parameters, one column per slot.
Eigen::MatrixXd parameter_jacobian(Expression const& e, Eigen::MatrixXd const& X, std::span<double const> theta);

} // namespace scsr
