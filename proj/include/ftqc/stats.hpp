#pragma once

// Rate estimation helpers: Wilson intervals and simple least-squares fits.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ftqc {

struct RatePoint {
    double x = 0;  // e.g. physical error rate
    std::size_t trials = 0;
    std::size_t failures = 0;
    double rate() const { return trials ? double(failures) / double(trials) : 0.0; }
};

struct WilsonInterval {
    double low, high;
};

// 95% Wilson score interval (z = 1.96).
inline WilsonInterval wilson(std::size_t failures, std::size_t trials, double z = 1.959963985) {
    if (trials == 0) return {0.0, 1.0};
    double n = double(trials), p = double(failures) / n, z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = (z / denom) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct LinFit {
    double slope = 0, intercept = 0, r2 = 0;
};

inline LinFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("least_squares: need >= 2 points");
    double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    LinFit f;
    double denom = n * sxx - sx * sx;
    if (denom == 0) throw std::invalid_argument("least_squares: degenerate xs");
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += e * e;
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace ftqc
