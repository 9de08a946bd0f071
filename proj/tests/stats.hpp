#pragma once

// Shared statistical helpers for tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace test_stats {

// Chi-square goodness-of-fit statistic with low-expectation bins merged into
// their neighbor (expected count >= 5 rule). Returns {statistic, dof}.
inline std::pair<double, int> chi_square_stat(const std::vector<std::uint64_t>& observed,
                                              const std::vector<double>& expected) {
    if (observed.size() != expected.size()) throw std::invalid_argument("size mismatch");
    std::vector<double> obs_m, exp_m;
    double obs_acc = 0.0, exp_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        obs_acc += static_cast<double>(observed[i]);
        exp_acc += expected[i];
        if (exp_acc >= 5.0) {
            obs_m.push_back(obs_acc);
            exp_m.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (exp_acc > 0.0) {
        if (exp_m.empty()) {
            obs_m.push_back(obs_acc);
            exp_m.push_back(exp_acc);
        } else {
            obs_m.back() += obs_acc;
            exp_m.back() += exp_acc;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < obs_m.size(); ++i) {
        const double d = obs_m[i] - exp_m[i];
        stat += d * d / exp_m[i];
    }
    return {stat, static_cast<int>(obs_m.size()) - 1};
}

// True if the sample is consistent with the expected distribution at the
// given significance level.
inline bool chi_square_accepts(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& expected, double significance) {
    const auto [stat, dof] = chi_square_stat(observed, expected);
    if (dof < 1) return true;
    boost::math::chi_squared dist(dof);
    return stat <= boost::math::quantile(dist, 1.0 - significance);
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// Asymptotic two-sample KS critical value: c(alpha) * sqrt((m+n)/(m*n)),
// c(alpha) = sqrt(-ln(alpha/2) / 2).
inline double ks_critical(double alpha, std::size_t m, std::size_t n) {
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    return c * std::sqrt(static_cast<double>(m + n) / (static_cast<double>(m) * n));
}

}  // namespace test_stats
