#include "scsr/localopt.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace scsr {

namespace {

double sse_of(Expression const& e, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y, std::span<double const> theta)
{
    Eigen::ArrayXd const r = evaluate(e, X, theta) - y;
    double const s = r.square().sum();
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd jacobian_from(std::vector<Expression> const& grads, Eigen::MatrixXd const& X, std::span<double const> theta)
{
    Eigen::MatrixXd J(X.rows(), static_cast<Eigen::Index>(grads.size()));
    for (std::size_t j = 0; j < grads.size(); ++j) {
        J.col(static_cast<Eigen::Index>(j)) = evaluate(grads[j], X, theta).matrix();
    }
    return J;
}

} // namespace

Eigen::MatrixXd parameter_jacobian(Expression const& e, Eigen::MatrixXd const& X, std::span<double const> theta)
{
    std::vector<Expression> grads;
    for (int j = 0; j < e.parameter_count(); ++j) {
        grads.push_back(differentiate_param(e, j));
    }
    return jacobian_from(grads, X, theta);
}

LMResult optimize_parameters(Expression const& e, LMConfig const& cfg, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y)
{
    ParameterVector theta = extract_params(e);
    LMResult result{e, 0.0, 0.0, 0};
    result.initial_sse = sse_of(e, X, y, theta);
    result.final_sse = result.initial_sse;
    if (theta.empty() || cfg.max_iterations <= 0 || !std::isfinite(result.initial_sse)) {
        return result;
    }

    std::vector<Expression> grads;
    grads.reserve(theta.size());
    for (int j = 0; j < static_cast<int>(theta.size()); ++j) {
        grads.push_back(differentiate_param(e, j));
    }

    auto const p = static_cast<Eigen::Index>(theta.size());
    double lambda = cfg.initial_damping;
    double sse = result.initial_sse;
    ParameterVector trial(theta.size());

    for (int it = 0; it < cfg.max_iterations; ++it) {
        result.iterations = it + 1;
        Eigen::VectorXd const r = (evaluate(e, X, theta) - y).matrix();
        Eigen::MatrixXd const J = jacobian_from(grads, X, theta);
        if (!J.allFinite()) {
            break;
        }
        Eigen::MatrixXd const JtJ = J.transpose() * J;
        Eigen::VectorXd const g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < cfg.gradient_tolerance) {
            break;
        }

        bool accepted = false;
        for (int rej = 0; rej < cfg.max_rejections && !accepted; ++rej) {
            Eigen::MatrixXd A = JtJ;
            for (Eigen::Index k = 0; k < p; ++k) {
                // Marquardt scaling with an absolute floor for zero curvature
                A(k, k) += lambda * std::max(JtJ(k, k), 1e-12);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
            Eigen::VectorXd step = ldlt.solve(-g);
            if (ldlt.info() != Eigen::Success || !step.allFinite()) {
                lambda *= cfg.damping_up;
                continue;
            }
            for (Eigen::Index k = 0; k < p; ++k) {
                trial[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(k)] + step(k);
            }
            double const trial_sse = sse_of(e, X, y, trial);
            if (trial_sse < sse) {
                theta = trial;
                sse = trial_sse;
                lambda *= cfg.damping_down;
                accepted = true;
            } else {
                lambda *= cfg.damping_up;
            }
        }
        if (!accepted) {
            break;
        }
    }

    if (sse <= result.initial_sse) {
        result.expression = update_params(e, theta);
        result.final_sse = sse;
    }
    return result;
}

} // namespace scsr
