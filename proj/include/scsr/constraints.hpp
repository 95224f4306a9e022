#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scsr/interval.hpp"
#include "scsr/model.hpp"

namespace scsr {

/// Predicate sign * Op(f)(x) - threshold <= 0 for every x in the box, where Op
/// is either the identity (image constraint) or a partial derivative.
struct ShapeConstraint {
    enum class Kind { Image, Partial };

    Kind kind{Kind::Image};
    int var{0};
    int order{1};
    int sign{1};
    double threshold{0.0};

    static ShapeConstraint upper_bound(double hi) { return {Kind::Image, 0, 0, 1, hi}; }
    static ShapeConstraint lower_bound(double lo) { return {Kind::Image, 0, 0, -1, -lo}; }
    static ShapeConstraint non_decreasing(int var) { return {Kind::Partial, var, 1, -1, 0.0}; }
    static ShapeConstraint non_increasing(int var) { return {Kind::Partial, var, 1, 1, 0.0}; }

    [[nodiscard]] std::string describe() const;
    friend bool operator==(ShapeConstraint const&, ShapeConstraint const&) = default;
};

struct ConstraintSet {
    std::vector<ShapeConstraint> constraints;
    Box box;

    [[nodiscard]] bool empty() const noexcept { return constraints.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return constraints.size(); }
};

/// +1 non-decreasing, -1 non-increasing, 0 unconstrained; optional output range.
/// Throws std::invalid_argument when the tuple length differs from the box dimension
/// or an entry is outside {-1, 0, 1}.
ConstraintSet from_monotonicity_tuple(
    std::span<int const> tuple, Box box, std::optional<Interval> image_bounds = std::nullopt);

/// Interval of Op(f) (unsigned, before the threshold) for each constraint.
std::vector<Interval> constraint_intervals(ShapeModel const& f, ConstraintSet const& c);

/// max(0, sup(sign * I) - threshold), +inf for an undefined interval.
double violation(ShapeConstraint const& c, Interval const& op_interval) noexcept;

struct CheckResult {
    bool feasible{true};
    double total_violation{0.0};
    std::vector<double> per_constraint;
    // a non-empty constraint set also requires the model to be defined on the whole box
    bool image_defined{true};
};

CheckResult check_from_intervals(ConstraintSet const& c, std::span<Interval const> op_intervals, Interval const& image);
CheckResult check_pessimistic(ShapeModel const& f, ConstraintSet const& c);

struct AuditReport {
    std::size_t samples{0};
    std::vector<std::size_t> violated; // per constraint, number of violating sample points

    [[nodiscard]] bool feasible() const noexcept
    {
        for (auto v : violated) {
            if (v > 0) {
                return false;
            }
        }
        return true;
    }
    friend bool operator==(AuditReport const&, AuditReport const&) = default;
};

/// Pointwise violation tolerance of the empirical audit.
inline constexpr double kAuditTolerance = 1e-9;

/// Uniformly samples the box and counts points where each constraint is
/// violated by more than kAuditTolerance (non-finite values count as violations).
/// Sampling is split into fixed chunks with derived seeds, so the report does
/// not depend on `workers`.
AuditReport audit_empirical(
    ShapeModel const& f, ConstraintSet const& c, std::size_t n_samples, std::uint64_t seed, int workers = 1);

} // namespace scsr
