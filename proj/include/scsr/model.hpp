#pragma once

#include <Eigen/Core>

#include "scsr/expr.hpp"
#include "scsr/interval.hpp"

namespace scsr {

/// A regression model that can be checked against shape constraints: it
/// evaluates pointwise and bounds itself and its partial derivatives over a box.
class ShapeModel {
public:
    virtual ~ShapeModel() = default;

    [[nodiscard]] virtual Eigen::ArrayXd predict(Eigen::MatrixXd const& X) const = 0;
    [[nodiscard]] virtual Eigen::ArrayXd partial(Eigen::MatrixXd const& X, int var, int order) const = 0;
    [[nodiscard]] virtual Interval image(Box const& box) const = 0;
    [[nodiscard]] virtual Interval partial_interval(Box const& box, int var, int order) const = 0;
};

/// Expression tree viewed as a model; derivatives are taken symbolically.
class TreeModel final : public ShapeModel {
public:
    explicit TreeModel(Expression e)
        : expr_(std::move(e))
    {
    }

    [[nodiscard]] Expression const& expression() const noexcept { return expr_; }

    Eigen::ArrayXd predict(Eigen::MatrixXd const& X) const override { return evaluate(expr_, X); }
    Eigen::ArrayXd partial(Eigen::MatrixXd const& X, int var, int order) const override
    {
        return evaluate(differentiate(expr_, var, order), X);
    }
    Interval image(Box const& box) const override { return evaluate_interval(expr_, box); }
    Interval partial_interval(Box const& box, int var, int order) const override
    {
        return evaluate_interval(differentiate(expr_, var, order), box);
    }

private:
    Expression expr_;
};

} // namespace scsr
