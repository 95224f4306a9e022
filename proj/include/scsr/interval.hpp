#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace scsr {

/// Closed interval over the extended reals. An undefined interval marks a
/// domain violation somewhere upstream; its bounds carry no meaning.
struct Interval {
    double lo{0.0};
    double hi{0.0};
    bool defined{true};

    static constexpr Interval point(double v) noexcept { return {v, v, true}; }
    static constexpr Interval undefined() noexcept
    {
        return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), false};
    }
    static constexpr Interval entire() noexcept
    {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), true};
    }

    [[nodiscard]] bool contains(double v) const noexcept { return defined && lo <= v && v <= hi; }
    [[nodiscard]] bool contains_zero() const noexcept { return defined && lo <= 0.0 && 0.0 <= hi; }
    [[nodiscard]] bool subset_of(Interval const& o) const noexcept
    {
        return defined && o.defined && o.lo <= lo && hi <= o.hi;
    }
    [[nodiscard]] double width() const noexcept { return hi - lo; }
    [[nodiscard]] bool is_finite() const noexcept { return defined && std::isfinite(lo) && std::isfinite(hi); }

    friend bool operator==(Interval const& a, Interval const& b) noexcept
    {
        if (!a.defined || !b.defined) {
            return a.defined == b.defined;
        }
        return a.lo == b.lo && a.hi == b.hi;
    }
};

/// One interval per input variable; components are finite and defined.
using Box = std::vector<Interval>;

/// Univariate primitives shared by the tree and IT function sets.
enum class UnaryFn {
    Id,
    Log,
    Exp,
    Sin,
    Cos,
    Tanh,
    Square,
    Sqrt,
    Log1p,
    Recip, // unprotected 1/x, only produced by differentiation
};

std::string_view to_string(UnaryFn f) noexcept;
UnaryFn unary_fn_from_string(std::string_view name); // throws std::invalid_argument

double apply(UnaryFn f, double x) noexcept;

Interval ia_add(Interval const& a, Interval const& b) noexcept;
Interval ia_sub(Interval const& a, Interval const& b) noexcept;
Interval ia_mul(Interval const& a, Interval const& b) noexcept;
Interval ia_neg(Interval const& a) noexcept;
// Undefined whenever the divisor interval contains zero.
Interval ia_div(Interval const& a, Interval const& b) noexcept;
Interval ia_unary(UnaryFn f, Interval const& a) noexcept;
Interval ia_pow_int(Interval const& a, int k) noexcept;
Interval ia_scale(Interval const& a, double s) noexcept;

// hull of two intervals; undefined if either is
Interval ia_hull(Interval const& a, Interval const& b) noexcept;

// Arithmetic sugar, used by the generic benchmark formulas.
inline Interval operator+(Interval const& a, Interval const& b) noexcept { return ia_add(a, b); }
inline Interval operator-(Interval const& a, Interval const& b) noexcept { return ia_sub(a, b); }
inline Interval operator*(Interval const& a, Interval const& b) noexcept { return ia_mul(a, b); }
inline Interval operator/(Interval const& a, Interval const& b) noexcept { return ia_div(a, b); }
inline Interval operator-(Interval const& a) noexcept { return ia_neg(a); }
inline Interval operator+(Interval const& a, double b) noexcept { return ia_add(a, Interval::point(b)); }
inline Interval operator+(double a, Interval const& b) noexcept { return ia_add(Interval::point(a), b); }
inline Interval operator-(Interval const& a, double b) noexcept { return ia_sub(a, Interval::point(b)); }
inline Interval operator-(double a, Interval const& b) noexcept { return ia_sub(Interval::point(a), b); }
inline Interval operator*(Interval const& a, double b) noexcept { return ia_scale(a, b); }
inline Interval operator*(double a, Interval const& b) noexcept { return ia_scale(b, a); }
inline Interval operator/(Interval const& a, double b) noexcept { return ia_div(a, Interval::point(b)); }
inline Interval operator/(double a, Interval const& b) noexcept { return ia_div(Interval::point(a), b); }

inline Interval exp(Interval const& a) noexcept { return ia_unary(UnaryFn::Exp, a); }
inline Interval log(Interval const& a) noexcept { return ia_unary(UnaryFn::Log, a); }
inline Interval sin(Interval const& a) noexcept { return ia_unary(UnaryFn::Sin, a); }
inline Interval cos(Interval const& a) noexcept { return ia_unary(UnaryFn::Cos, a); }
inline Interval tanh(Interval const& a) noexcept { return ia_unary(UnaryFn::Tanh, a); }
inline Interval sqrt(Interval const& a) noexcept { return ia_unary(UnaryFn::Sqrt, a); }
inline Interval square(Interval const& a) noexcept { return ia_unary(UnaryFn::Square, a); }
inline Interval pow_int(Interval const& a, int k) noexcept { return ia_pow_int(a, k); }
// asin is not part of any search function set; it only appears in benchmark formulas
Interval asin(Interval const& a) noexcept;

} // namespace scsr
