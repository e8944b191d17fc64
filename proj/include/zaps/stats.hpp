#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace zaps::stats {

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty");
    double s = 0;
    for (double x : xs) s += x;
    return s / double(xs.size());
}

inline double variance(const std::vector<double>& xs) {
    double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return xs.size() > 1 ? s / double(xs.size() - 1) : 0.0;
}

inline double stdev(const std::vector<double>& xs) { return std::sqrt(variance(xs)); }

// Ordinary least squares y = slope*x + intercept with the coefficient of
// determination. r2 is defined as 0 when y is constant (no variance to
// explain), catching the degenerate flat-line case instead of dividing by
// zero.
struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("linear_fit");
    double mx = mean(xs), my = mean(ys);
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("linear_fit: constant x");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy > 0) {
        double ss_res = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double e = ys[i] - (f.slope * xs[i] + f.intercept);
            ss_res += e * e;
        }
        f.r2 = 1.0 - ss_res / syy;
    }
    return f;
}

inline bool non_decreasing(const std::vector<double>& xs, double slack = 0.0) {
    for (size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] + slack < xs[i - 1]) return false;
    }
    return true;
}

}  // namespace zaps::stats
