#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rmlab::stats {

inline double mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("stats::mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Raw moment E[x^order].
inline double raw_moment(const std::vector<double>& x, int order) {
    if (x.empty()) throw std::invalid_argument("stats::raw_moment: empty sample");
    double s = 0.0;
    for (double v : x) s += std::pow(v, order);
    return s / static_cast<double>(x.size());
}

/// Jackknife standard error of the sample mean of x. NaN for fewer than two
/// observations (single-sample runs report it as undefined).
inline double jackknife_se_mean(const std::vector<double>& x) {
    const std::size_t m = x.size();
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    double total = 0.0;
    for (double v : x) total += v;
    const double n1 = static_cast<double>(m - 1);
    double loo_sum = 0.0;
    std::vector<double> loo(m);
    for (std::size_t i = 0; i < m; ++i) {
        loo[i] = (total - x[i]) / n1;
        loo_sum += loo[i];
    }
    const double loo_mean = loo_sum / static_cast<double>(m);
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    return std::sqrt(n1 / static_cast<double>(m) * ss);
}

inline double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw std::invalid_argument("stats::quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("stats::quantile: q outside [0,1]");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * x[lo] + w * x[hi];
}

inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

/// Survival function of the Kolmogorov distribution, Q(t) = 2 sum (-1)^{j-1} exp(-2 j^2 t^2).
inline double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the Stephens small-sample correction.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("stats::ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

/// One-sample KS distance against a cdf.
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
    if (x.empty()) throw std::invalid_argument("stats::ks_distance: empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

}  // namespace rmlab::stats
