#pragma once

#include <algorithm>
#include <cmath>

#include "scsr/interval.hpp"
#include "scsr/random.hpp"

namespace scsr::testing {

// value lies inside iv up to a relative outward slack
inline bool inside(Interval const& iv, double v, double slack)
{
    if (!iv.defined) {
        return true;
    }
    double const tol = slack * std::max({1.0, std::abs(v), std::abs(iv.lo) < 1e300 ? std::abs(iv.lo) : 0.0,
                                   std::abs(iv.hi) < 1e300 ? std::abs(iv.hi) : 0.0});
    return v >= iv.lo - tol && v <= iv.hi + tol;
}

inline Interval random_interval(Rng& rng, double lo = -5.0, double hi = 5.0)
{
    double a = uniform_real(rng, lo, hi);
    double b = uniform_real(rng, lo, hi);
    if (a > b) {
        std::swap(a, b);
    }
    return {a, b, true};
}

inline double random_point(Rng& rng, Interval const& iv)
{
    return uniform_real(rng, iv.lo, iv.hi);
}

// brute-force image of a scalar function over a dense grid of one interval
template <typename F>
Interval grid_image(F f, Interval const& a, int n = 100001)
{
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int i = 0; i < n; ++i) {
        double const x = a.lo + (a.hi - a.lo) * i / (n - 1);
        double const v = f(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi, true};
}

template <typename F>
Interval grid_image2(F f, Interval const& a, Interval const& b, int n = 1001)
{
    double lo = INFINITY;
    double hi = -INFINITY;
    for (int i = 0; i < n; ++i) {
        double const x = a.lo + (a.hi - a.lo) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            double const y = b.lo + (b.hi - b.lo) * j / (n - 1);
            double const v = f(x, y);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi, true};
}

} // namespace scsr::testing
