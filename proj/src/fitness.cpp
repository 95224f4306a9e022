#include "scsr/fitness.hpp"

#include <cmath>
#include <stdexcept>

namespace scsr {

LinearScaling fit_linear_scaling(Eigen::ArrayXd const& pred, Eigen::ArrayXd const& y)
{
    double const mp = pred.mean();
    double const my = y.mean();
    Eigen::ArrayXd const dp = pred - mp;
    double const var = dp.square().mean();
    if (!(var >= kVarianceGuard)) {
        return {my, 0.0};
    }
    double const cov = (dp * (y - my)).mean();
    double const b = cov / var;
    return {my - b * mp, b};
}

ScaledModel linear_scale(std::shared_ptr<ShapeModel const> f, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y)
{
    auto const s = fit_linear_scaling(f->predict(X), y);
    return ScaledModel(std::move(f), s.offset, s.scale);
}

double nmse(Eigen::ArrayXd const& pred, Eigen::ArrayXd const& y)
{
    if (pred.size() != y.size()) {
        throw std::invalid_argument("nmse: prediction and target lengths differ");
    }
    if (!pred.allFinite()) {
        return 1.0;
    }
    double const sst = (y - y.mean()).square().sum();
    double const sse = (pred - y).square().sum();
    double const v = sse / sst;
    if (!std::isfinite(v)) {
        return 1.0;
    }
    return std::min(v, 1.0);
}

Evaluation evaluate_fitness(ShapeModel const& f, Eigen::MatrixXd const& X, Eigen::ArrayXd const& y, ConstraintSet const& c)
{
    Evaluation out;
    std::vector<Interval> intervals;
    Interval image;
    if (!c.empty()) {
        image = f.image(c.box);
        intervals = constraint_intervals(f, c);
        bool defined = image.defined;
        for (auto const& iv : intervals) {
            defined = defined && iv.defined;
        }
        if (!defined) {
            out.feasible = false;
            return out;
        }
    }

    auto const pred = f.predict(X);
    out.predicted = true;
    if (!pred.allFinite()) {
        out.feasible = c.empty();
        return out;
    }
    out.scaling = fit_linear_scaling(pred, y);
    auto const& [a, b] = out.scaling;

    if (!c.empty()) {
        // the scaled model's intervals follow from the unscaled ones
        std::vector<Interval> scaled(intervals.size());
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            scaled[i] = c.constraints[i].kind == ShapeConstraint::Kind::Image
                ? ia_add(Interval::point(a), ia_scale(intervals[i], b))
                : ia_scale(intervals[i], b);
        }
        auto const check = check_from_intervals(c, scaled, image);
        if (!check.feasible) {
            out.feasible = false;
            return out;
        }
    }
    out.nmse = nmse(a + b * pred, y);
    return out;
}

} // namespace scsr
