#pragma once

#include <memory>

#include <Eigen/Core>

#include "scsr/constraints.hpp"
#include "scsr/model.hpp"

namespace scsr {

/// Predictions below this variance are treated as a constant predictor.
inline constexpr double kVarianceGuard = 1e-12;

/// offset + scale * inner(x); derivatives scale by `scale` only.
class ScaledModel final : public ShapeModel {
public:
    ScaledModel(std::shared_ptr<ShapeModel const> inner, double offset, double scale)
        : inner_(std::move(inner))
        , offset_(offset)
        , scale_(scale)
    {
    }

    [[nodiscard]] double offset() const noexcept { return offset_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] ShapeModel const& inner() const noexcept { return *inner_; }

    Eigen::ArrayXd predict(Eigen::MatrixXd const& X) const override
    {
        return offset_ + scale_ * inner_->predict(X);
    }
    Eigen::ArrayXd partial(Eigen::MatrixXd const& X, int var, int order) const override
    {
        return scale_ * inner_->partial(X, var, order);
    }
    Interval image(Box const& box) const override
    {
        return ia_add(Interval::point(offset_), ia_scale(inner_->image(box), scale_));
    }
    Interval partial_interval(Box const& box, int var, int order) const override
    {
        return ia_scale(inner_->partial_interval(box, var, order), scale_);
    }

private:
    std::shared_ptr<ShapeModel const> inner_;
    double offset_;
    double scale_;
};

struct LinearScaling {
    double offset{0.0};
    double scale{1.0};
};

/// Least-squares affine fit of y on the predictions. Degenerate prediction
/// variance yields scale 0 and the target mean as offset.
LinearScaling fit_linear_scaling(Eigen::ArrayXd const& pred, Eigen::ArrayXd const& y);
ScaledModel linear_scale(std::shared_ptr<ShapeModel const> f, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y);

/// min(SSE / SST, 1); any non-finite prediction gives 1.
double nmse(Eigen::ArrayXd const& pred, Eigen::ArrayXd const& y);

struct Evaluation {
    double nmse{1.0};
    LinearScaling scaling{};
    bool feasible{true};
    bool predicted{false}; // false when the interval check short-circuited
};

/// Constraint-aware fitness: linear scaling on the training data, pessimistic
/// constraint check of the scaled model, NMSE of feasible candidates, 1 otherwise.
/// Models undefined somewhere on the box are rejected before any prediction is made.
Evaluation evaluate_fitness(ShapeModel const& f, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y, ConstraintSet const& c);

} // namespace scsr
