#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "cas/error.hpp"

namespace cas {

struct TestResult {
    double statistic = 0.0; // r for Pearson, min(W+, W-) for Wilcoxon
    double p_value = 1.0;
};

/// Pearson r with a two-sided p-value from the t-distribution on n-2 df.
inline TestResult pearson(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) {
        throw ValidationError("pearson: series differ in length");
    }
    const std::size_t n = x.size();
    if (n < 3) {
        throw ValidationError("pearson: need at least 3 points, got " + std::to_string(n));
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateError("pearson: a series has zero variance");
    }
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    TestResult out{r, 0.0};
    if (std::abs(r) < 1.0) {
        const double df = static_cast<double>(n - 2);
        const double t = r * std::sqrt(df / (1.0 - r * r));
        const boost::math::students_t dist(df);
        out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    }
    return out;
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped, tied magnitudes share their average rank, and the p-value uses
/// the normal approximation with tie-corrected variance.
inline TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size()) {
        throw ValidationError("wilcoxon: series differ in length");
    }
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] - a[i] != 0.0) {
            d.push_back(b[i] - a[i]);
        }
    }
    if (d.empty()) {
        throw DegenerateError("wilcoxon: all differences are zero");
    }
    const std::size_t n = d.size();
    if (n < 6) {
        throw ValidationError("wilcoxon: need at least 6 non-zero differences, got " + std::to_string(n));
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        idx[i] = i;
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return std::abs(d[l]) < std::abs(d[r]); });
    std::vector<double> rank(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(d[idx[j + 1]]) == std::abs(d[idx[i]])) {
            ++j;
        }
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) {
            rank[idx[t]] = avg;
        }
        const double size = static_cast<double>(j - i + 1);
        tie_term += size * size * size - size;
        i = j + 1;
    }
    double w_plus = 0.0;
    double w_minus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        (d[i] > 0.0 ? w_plus : w_minus) += rank[i];
    }
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double stat = std::min(w_plus, w_minus);
    const double z = (stat - mean) / std::sqrt(var);
    return {stat, std::erfc(std::abs(z) / std::sqrt(2.0))};
}

} // namespace cas
