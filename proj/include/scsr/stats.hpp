#pragma once

#include <algorithm>
#include <limits>
#include <vector>

namespace scsr {

/// Median by sorting; the mean of the two middle values for even counts.
inline double median(std::vector<double> v)
{
    if (v.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(v.begin(), v.end());
    auto const n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace scsr
