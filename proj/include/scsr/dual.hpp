#pragma once

#include <cmath>
#include <type_traits>

#include "scsr/interval.hpp"

// Forward-mode dual numbers over double or Interval, used to differentiate the
// closed-form benchmark formulas pointwise and over boxes.
namespace scsr::fm {

template <typename T>
T lift(double c)
{
    if constexpr (std::is_same_v<T, Interval>) {
        return Interval::point(c);
    } else {
        return T(c);
    }
}

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double asin(double x) { return std::asin(x); }
inline double square(double x) { return x * x; }
inline double pow_int(double x, int k) { return std::pow(x, k); }

template <typename T>
struct Dual {
    T v;
    T d;
};

template <typename T>
Dual<T> constant(double c)
{
    return {lift<T>(c), lift<T>(0.0)};
}

template <typename T> Dual<T> operator+(Dual<T> const& a, Dual<T> const& b) { return {a.v + b.v, a.d + b.d}; }
template <typename T> Dual<T> operator-(Dual<T> const& a, Dual<T> const& b) { return {a.v - b.v, a.d - b.d}; }
template <typename T> Dual<T> operator-(Dual<T> const& a) { return {-a.v, -a.d}; }
template <typename T> Dual<T> operator*(Dual<T> const& a, Dual<T> const& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <typename T>
Dual<T> operator/(Dual<T> const& a, Dual<T> const& b)
{
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / square(b.v)};
}

template <typename T> Dual<T> operator+(Dual<T> const& a, double c) { return {a.v + c, a.d}; }
template <typename T> Dual<T> operator+(double c, Dual<T> const& a) { return {c + a.v, a.d}; }
template <typename T> Dual<T> operator-(Dual<T> const& a, double c) { return {a.v - c, a.d}; }
template <typename T> Dual<T> operator-(double c, Dual<T> const& a) { return {c - a.v, -a.d}; }
template <typename T> Dual<T> operator*(Dual<T> const& a, double c) { return {a.v * c, a.d * c}; }
template <typename T> Dual<T> operator*(double c, Dual<T> const& a) { return {c * a.v, c * a.d}; }
template <typename T> Dual<T> operator/(Dual<T> const& a, double c) { return {a.v / c, a.d / c}; }
template <typename T> Dual<T> operator/(double c, Dual<T> const& a) { return {c / a.v, -c * a.d / square(a.v)}; }

template <typename T>
Dual<T> exp(Dual<T> const& a)
{
    T const e = exp(a.v);
    return {e, a.d * e};
}
template <typename T> Dual<T> log(Dual<T> const& a) { return {log(a.v), a.d / a.v}; }
template <typename T> Dual<T> sin(Dual<T> const& a) { return {sin(a.v), a.d * cos(a.v)}; }
template <typename T> Dual<T> cos(Dual<T> const& a) { return {cos(a.v), -(a.d * sin(a.v))}; }
template <typename T>
Dual<T> tanh(Dual<T> const& a)
{
    T const t = tanh(a.v);
    return {t, a.d * (1.0 - square(t))};
}
template <typename T>
Dual<T> sqrt(Dual<T> const& a)
{
    T const s = sqrt(a.v);
    return {s, a.d / (2.0 * s)};
}
template <typename T> Dual<T> square(Dual<T> const& a) { return {square(a.v), 2.0 * a.v * a.d}; }
template <typename T> Dual<T> asin(Dual<T> const& a) { return {asin(a.v), a.d / sqrt(1.0 - square(a.v))}; }
template <typename T>
Dual<T> pow_int(Dual<T> const& a, int k)
{
    return {pow_int(a.v, k), static_cast<double>(k) * pow_int(a.v, k - 1) * a.d};
}

} // namespace scsr::fm
