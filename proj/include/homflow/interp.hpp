#pragma once

#include <cstddef>
#include <vector>

namespace homflow {

/// Value of the cubic Hermite segment through (0,u0,du0), (h,u1,du1) at s = t/h.
inline double hermite_value(double u0, double du0, double u1, double du1, double h,
                            double s) {
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * u0 + (s3 - 2 * s2 + s) * h * du0 +
           (-2 * s3 + 3 * s2) * u1 + (s3 - s2) * h * du1;
}

/// Derivative (in t) of the same segment.
inline double hermite_slope(double u0, double du0, double u1, double du1, double h,
                            double s) {
    double s2 = s * s;
    return ((6 * s2 - 6 * s) * u0 + (3 * s2 - 4 * s + 1) * h * du0 +
            (-6 * s2 + 6 * s) * u1 + (3 * s2 - 2 * s) * h * du1) /
           h;
}

/// Index i with x[i] <= v < x[i+1], clamped to [0, n-2]; x strictly increasing.
inline std::size_t bracket_index(const std::vector<double>& x, double v) {
    if (v <= x.front()) return 0;
    if (v >= x.back()) return x.size() - 2;
    std::size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (x[mid] <= v)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace homflow
