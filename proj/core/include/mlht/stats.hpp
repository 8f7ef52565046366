#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mlht {

inline double sample_mean(std::span<const double> x)
{
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Unbiased (n-1) sample variance; 0 for fewer than two samples.
inline double sample_variance(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = sample_mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - 1);
}

/// Standard error of the sample mean.
inline double standard_error(std::span<const double> x)
{
    if (x.empty()) return 0.0;
    return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

/// Fourth standardized central moment m4/m2^2. Undefined (nullopt) for
/// fewer than 4 samples or zero sample variance.
inline std::optional<double> sample_kurtosis(std::span<const double> x)
{
    const std::size_t n = x.size();
    if (n < 4) return std::nullopt;
    bool constant = true;
    for (double v : x)
        if (v != x[0]) {
            constant = false;
            break;
        }
    if (constant) return std::nullopt;
    const double m = sample_mean(x);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 <= 0.0) return std::nullopt;
    return m4 / (m2 * m2);
}

/// Least-squares slope of y against x.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

} // namespace mlht
