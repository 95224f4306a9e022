#include "scsr/interval.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace scsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 0 * inf is taken as 0: the zero endpoint is exact, the infinite one a vacuous bound.
double mul_endpoint(double a, double b) noexcept
{
    if (a == 0.0 || b == 0.0) {
        return 0.0;
    }
    return a * b;
}

Interval make(double lo, double hi) noexcept
{
    if (std::isnan(lo) || std::isnan(hi)) {
        return Interval::undefined();
    }
    return {lo, hi, true};
}

// A 2pi-periodic function over [lo, hi]: endpoint values plus any interior
// extremum, located at max_at + 2k pi and min_at + 2k pi.
Interval periodic_interval(double (*f)(double), double max_at, double min_at, double lo, double hi) noexcept
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (!(hi - lo < two_pi)) {
        return {-1.0, 1.0, true};
    }
    double const f_lo = f(lo);
    double const f_hi = f(hi);
    double out_lo = std::min(f_lo, f_hi);
    double out_hi = std::max(f_lo, f_hi);
    auto contains_critical = [&](double offset) {
        double const k = std::ceil((lo - offset) / two_pi);
        return offset + k * two_pi <= hi;
    };
    if (contains_critical(max_at)) {
        out_hi = 1.0;
    }
    if (contains_critical(min_at)) {
        out_lo = -1.0;
    }
    return {out_lo, out_hi, true};
}

Interval monotone_increasing(double (*f)(double), Interval const& a) noexcept
{
    return make(f(a.lo), f(a.hi));
}

} // namespace

std::string_view to_string(UnaryFn f) noexcept
{
    switch (f) {
    case UnaryFn::Id: return "id";
    case UnaryFn::Log: return "log";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Tanh: return "tanh";
    case UnaryFn::Square: return "square";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Log1p: return "log1p";
    case UnaryFn::Recip: return "recip";
    }
    return "?";
}

UnaryFn unary_fn_from_string(std::string_view name)
{
    for (auto f : {UnaryFn::Id, UnaryFn::Log, UnaryFn::Exp, UnaryFn::Sin, UnaryFn::Cos, UnaryFn::Tanh,
             UnaryFn::Square, UnaryFn::Sqrt, UnaryFn::Log1p, UnaryFn::Recip}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw std::invalid_argument("unknown function '" + std::string(name) + "'");
}

double apply(UnaryFn f, double x) noexcept
{
    switch (f) {
    case UnaryFn::Id: return x;
    case UnaryFn::Log: return std::log(x);
    case UnaryFn::Exp: return std::exp(x);
    case UnaryFn::Sin: return std::sin(x);
    case UnaryFn::Cos: return std::cos(x);
    case UnaryFn::Tanh: return std::tanh(x);
    case UnaryFn::Square: return x * x;
    case UnaryFn::Sqrt: return std::sqrt(x);
    case UnaryFn::Log1p: return std::log1p(x);
    case UnaryFn::Recip: return 1.0 / x;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

Interval ia_add(Interval const& a, Interval const& b) noexcept
{
    if (!a.defined || !b.defined) {
        return Interval::undefined();
    }
    return make(a.lo + b.lo, a.hi + b.hi);
}

Interval ia_sub(Interval const& a, Interval const& b) noexcept
{
    if (!a.defined || !b.defined) {
        return Interval::undefined();
    }
    return make(a.lo - b.hi, a.hi - b.lo);
}

Interval ia_neg(Interval const& a) noexcept
{
    if (!a.defined) {
        return a;
    }
    return {-a.hi, -a.lo, true};
}

Interval ia_mul(Interval const& a, Interval const& b) noexcept
{
    if (!a.defined || !b.defined) {
        return Interval::undefined();
    }
    double const p[] = {mul_endpoint(a.lo, b.lo), mul_endpoint(a.lo, b.hi), mul_endpoint(a.hi, b.lo),
        mul_endpoint(a.hi, b.hi)};
    auto [mn, mx] = std::minmax_element(std::begin(p), std::end(p));
    return make(*mn, *mx);
}

Interval ia_scale(Interval const& a, double s) noexcept
{
    return ia_mul(a, Interval::point(s));
}

Interval ia_div(Interval const& a, Interval const& b) noexcept
{
    if (!a.defined || !b.defined || b.contains_zero()) {
        return Interval::undefined();
    }
    return ia_mul(a, Interval{1.0 / b.hi, 1.0 / b.lo, true});
}

Interval ia_hull(Interval const& a, Interval const& b) noexcept
{
    if (!a.defined || !b.defined) {
        return Interval::undefined();
    }
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi), true};
}

Interval ia_unary(UnaryFn f, Interval const& a) noexcept
{
    if (!a.defined) {
        return a;
    }
    switch (f) {
    case UnaryFn::Id:
        return a;
    case UnaryFn::Log:
        if (a.lo <= 0.0) {
            return Interval::undefined();
        }
        return monotone_increasing([](double x) { return std::log(x); }, a);
    case UnaryFn::Log1p:
        if (a.lo <= -1.0) {
            return Interval::undefined();
        }
        return monotone_increasing([](double x) { return std::log1p(x); }, a);
    case UnaryFn::Sqrt:
        if (a.lo < 0.0) {
            return Interval::undefined();
        }
        return monotone_increasing([](double x) { return std::sqrt(x); }, a);
    case UnaryFn::Exp:
        return monotone_increasing([](double x) { return std::exp(x); }, a);
    case UnaryFn::Tanh:
        return monotone_increasing([](double x) { return std::tanh(x); }, a);
    case UnaryFn::Sin:
        if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
            return {-1.0, 1.0, true};
        }
        return periodic_interval([](double x) { return std::sin(x); }, std::numbers::pi / 2.0, -std::numbers::pi / 2.0, a.lo, a.hi);
    case UnaryFn::Cos:
        if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
            return {-1.0, 1.0, true};
        }
        // evaluated directly: shifting by pi/2 would round away the endpoint at large arguments
        return periodic_interval([](double x) { return std::cos(x); }, 0.0, std::numbers::pi, a.lo, a.hi);
    case UnaryFn::Square:
        return ia_pow_int(a, 2);
    case UnaryFn::Recip:
        return ia_div(Interval::point(1.0), a);
    }
    return Interval::undefined();
}

Interval ia_pow_int(Interval const& a, int k) noexcept
{
    if (!a.defined) {
        return a;
    }
    if (k == 0) {
        return Interval::point(1.0);
    }
    if (k < 0) {
        if (a.contains_zero()) {
            return Interval::undefined();
        }
        return ia_div(Interval::point(1.0), ia_pow_int(a, -k));
    }
    auto pw = [k](double x) { return std::pow(x, k); };
    if (k % 2 == 1) {
        return make(pw(a.lo), pw(a.hi));
    }
    if (a.lo >= 0.0) {
        return make(pw(a.lo), pw(a.hi));
    }
    if (a.hi <= 0.0) {
        return make(pw(a.hi), pw(a.lo));
    }
    return make(0.0, std::max(pw(a.lo), pw(a.hi)));
}

Interval asin(Interval const& a) noexcept
{
    if (!a.defined || a.lo < -1.0 || a.hi > 1.0) {
        return Interval::undefined();
    }
    return {std::asin(a.lo), std::asin(a.hi), true};
}

} // namespace scsr
