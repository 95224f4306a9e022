#include "scsr/constraints.hpp"

#include <cmath>
#include <stdexcept>

#include "scsr/parallel.hpp"
#include "scsr/random.hpp"

namespace scsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kAuditChunk = 10000;

} // namespace

std::string ShapeConstraint::describe() const
{
    std::string op = kind == Kind::Image ? "f" : (order == 1 ? "df/dx" : "d2f/dx") + std::to_string(var);
    if (kind == Kind::Partial && order == 2) {
        op += "^2";
    }
    std::string const lhs = (sign < 0 ? "-" : "") + op;
    return lhs + " <= " + std::to_string(threshold);
}

ConstraintSet from_monotonicity_tuple(std::span<int const> tuple, Box box, std::optional<Interval> image_bounds)
{
    if (tuple.size() != box.size()) {
        throw std::invalid_argument("monotonicity tuple has " + std::to_string(tuple.size())
            + " entries but the box has dimension " + std::to_string(box.size()));
    }
    ConstraintSet out;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        int const var = static_cast<int>(i);
        switch (tuple[i]) {
        case 1: out.constraints.push_back(ShapeConstraint::non_decreasing(var)); break;
        case -1: out.constraints.push_back(ShapeConstraint::non_increasing(var)); break;
        case 0: break;
        default: throw std::invalid_argument("monotonicity entries must be -1, 0 or 1");
        }
    }
    if (image_bounds) {
        out.constraints.push_back(ShapeConstraint::upper_bound(image_bounds->hi));
        out.constraints.push_back(ShapeConstraint::lower_bound(image_bounds->lo));
    }
    out.box = std::move(box);
    return out;
}

std::vector<Interval> constraint_intervals(ShapeModel const& f, ConstraintSet const& c)
{
    std::vector<Interval> out;
    out.reserve(c.size());
    std::optional<Interval> image;
    for (auto const& k : c.constraints) {
        if (k.kind == ShapeConstraint::Kind::Image) {
            if (!image) {
                image = f.image(c.box);
            }
            out.push_back(*image);
        } else {
            out.push_back(f.partial_interval(c.box, k.var, k.order));
        }
    }
    return out;
}

double violation(ShapeConstraint const& c, Interval const& op_interval) noexcept
{
    if (!op_interval.defined) {
        return kInf;
    }
    double const sup = c.sign > 0 ? op_interval.hi : -op_interval.lo;
    double const v = sup - c.threshold;
    if (std::isnan(v)) {
        return kInf;
    }
    return v > 0.0 ? v : 0.0;
}

CheckResult check_from_intervals(ConstraintSet const& c, std::span<Interval const> op_intervals, Interval const& image)
{
    CheckResult r;
    r.per_constraint.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        double const v = violation(c.constraints[i], op_intervals[i]);
        r.per_constraint.push_back(v);
        r.total_violation += v;
    }
    if (!c.empty() && !image.defined) {
        r.image_defined = false;
        r.total_violation = kInf;
    }
    r.feasible = r.total_violation == 0.0;
    return r;
}

CheckResult check_pessimistic(ShapeModel const& f, ConstraintSet const& c)
{
    if (c.empty()) {
        return {};
    }
    auto const intervals = constraint_intervals(f, c);
    return check_from_intervals(c, intervals, f.image(c.box));
}

AuditReport audit_empirical(
    ShapeModel const& f, ConstraintSet const& c, std::size_t n_samples, std::uint64_t seed, int workers)
{
    AuditReport report;
    report.samples = n_samples;
    report.violated.assign(c.size(), 0);
    if (n_samples == 0 || c.empty()) {
        return report;
    }
    auto const dim = static_cast<Eigen::Index>(c.box.size());
    std::size_t const chunks = (n_samples + kAuditChunk - 1) / kAuditChunk;
    std::vector<std::vector<std::size_t>> partial_counts(chunks, std::vector<std::size_t>(c.size(), 0));

    parallel_for(chunks, workers, [&](std::size_t chunk) {
        std::size_t const begin = chunk * kAuditChunk;
        auto const rows = static_cast<Eigen::Index>(std::min(kAuditChunk, n_samples - begin));
        Rng rng(derive_seed(seed, chunk));
        Eigen::MatrixXd X(rows, dim);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                auto const& iv = c.box[static_cast<std::size_t>(j)];
                X(r, j) = uniform_real(rng, iv.lo, iv.hi);
            }
        }
        std::optional<Eigen::ArrayXd> values;
        auto& counts = partial_counts[chunk];
        for (std::size_t k = 0; k < c.size(); ++k) {
            auto const& con = c.constraints[k];
            Eigen::ArrayXd op;
            if (con.kind == ShapeConstraint::Kind::Image) {
                if (!values) {
                    values = f.predict(X);
                }
                op = *values;
            } else {
                op = f.partial(X, con.var, con.order);
            }
            for (Eigen::Index r = 0; r < rows; ++r) {
                double const lhs = con.sign * op(r) - con.threshold;
                if (!std::isfinite(op(r)) || lhs > kAuditTolerance) {
                    ++counts[k];
                }
            }
        }
    });

    for (auto const& counts : partial_counts) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            report.violated[k] += counts[k];
        }
    }
    return report;
}

} // namespace scsr
