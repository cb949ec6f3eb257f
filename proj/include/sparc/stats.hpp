#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sparc {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Upper tail of the standard normal.
inline double q_function(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / (double)v.size();
}

inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (double)(v.size() - 1));
}

// Kolmogorov-Smirnov statistic of a sample against the standard normal.
inline double ks_vs_normal(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double n = (double)v.size();
    double d = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const double F = normal_cdf(v[i]);
        d = std::max(d, std::fabs(F - (double)(i + 1) / n));
        d = std::max(d, std::fabs(F - (double)i / n));
    }
    return d;
}

} // namespace sparc
