#pragma once

// Nonparametric comparison of two samples: Wilcoxon rank-sum (Mann-Whitney)
// and signed-rank tests, and the Vargha-Delaney A12 effect size.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "cidbench/core.hpp"

namespace cidbench {

enum class EffectMagnitude { Negligible, Small, Medium, Large };

inline const char *to_string(EffectMagnitude m) {
    switch (m) {
    case EffectMagnitude::Negligible:
        return "negligible";
    case EffectMagnitude::Small:
        return "small";
    case EffectMagnitude::Medium:
        return "medium";
    case EffectMagnitude::Large:
        return "large";
    }
    return "?";
}

struct StatResult {
    std::string pair_label;
    double p_value = 1.0;
    double a12 = 0.5;
    EffectMagnitude magnitude = EffectMagnitude::Negligible;
    bool significant = false;
};

namespace detail {

/// 1-based midranks of `values` (ties share their average rank).
inline std::vector<double> midranks(const std::vector<double> &values, std::vector<std::size_t> *tie_sizes = nullptr) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        if (tie_sizes && j > i) {
            tie_sizes->push_back(j - i + 1);
        }
        i = j + 1;
    }
    return ranks;
}

/// Two-sided p-value from a standard-normal z statistic.
inline double two_sided_normal(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

inline double two_sided_from_tails(double lower, double upper) {
    return std::min(1.0, 2.0 * std::min(lower, upper));
}

} // namespace detail

/// Two-sided Wilcoxon rank-sum test. Exact null distribution when the pooled
/// size is at most 20 and there are no ties; otherwise the normal
/// approximation with tie and continuity corrections.
inline double wilcoxon_rank_sum(const std::vector<double> &x, const std::vector<double> &y) {
    require(!x.empty(), "wilcoxon_rank_sum: first sample is empty");
    require(!y.empty(), "wilcoxon_rank_sum: second sample is empty");
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    const std::size_t total = n + m;

    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    std::vector<std::size_t> ties;
    const auto ranks = detail::midranks(pooled, &ties);
    const double w = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n), 0.0);

    if (total <= 20 && ties.empty()) {
        // count[k][s]: subsets of size k of the ranks seen so far with rank sum s
        const std::size_t max_sum = total * (total + 1) / 2;
        std::vector<std::vector<double>> count(n + 1, std::vector<double>(max_sum + 1, 0.0));
        count[0][0] = 1.0;
        for (std::size_t r = 1; r <= total; ++r) {
            for (std::size_t k = std::min(r, n); k >= 1; --k) {
                for (std::size_t s = max_sum; s >= r; --s) {
                    count[k][s] += count[k - 1][s - r];
                }
            }
        }
        const auto w_int = static_cast<std::size_t>(std::llround(w));
        double all = 0.0;
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            all += count[n][s];
            if (s <= w_int) lower += count[n][s];
            if (s >= w_int) upper += count[n][s];
        }
        return detail::two_sided_from_tails(lower / all, upper / all);
    }

    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    const double big_n = static_cast<double>(total);
    const double u = w - nn * (nn + 1.0) / 2.0;
    const double mean = nn * mm / 2.0;
    double tie_term = 0.0;
    for (std::size_t t : ties) {
        const double tt = static_cast<double>(t);
        tie_term += tt * tt * tt - tt;
    }
    const double variance = nn * mm / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
    if (variance <= 0.0) {
        return 1.0;
    }
    const double diff = u - mean;
    const double corrected = diff - 0.5 * (diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0));
    return std::min(1.0, detail::two_sided_normal(corrected / std::sqrt(variance)));
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped. Exact (all 2^n sign patterns, midranks allowed) for n <= 20
/// remaining pairs; normal approximation otherwise.
inline double wilcoxon_signed_rank(const std::vector<double> &x, const std::vector<double> &y) {
    require(!x.empty() && x.size() == y.size(), "wilcoxon_signed_rank: need equal, non-empty samples");
    std::vector<double> magnitude;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) {
            magnitude.push_back(std::abs(d));
            positive.push_back(d > 0.0);
        }
    }
    const std::size_t n = magnitude.size();
    if (n == 0) {
        return 1.0;
    }
    std::vector<std::size_t> ties;
    const auto ranks = detail::midranks(magnitude, &ties);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (positive[i]) v += ranks[i];
    }

    if (n <= 20) {
        // midranks are multiples of 1/2, so doubled ranks are integers
        std::vector<std::size_t> doubled(n);
        std::size_t max_sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
            max_sum += doubled[i];
        }
        std::vector<double> count(max_sum + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t r : doubled) {
            for (std::size_t s = max_sum; s >= r; --s) {
                count[s] += count[s - r];
            }
        }
        const auto v2 = static_cast<std::size_t>(std::llround(2.0 * v));
        const double all = std::ldexp(1.0, static_cast<int>(n));
        double lower = 0.0;
        double upper = 0.0;
        for (std::size_t s = 0; s <= max_sum; ++s) {
            if (s <= v2) lower += count[s];
            if (s >= v2) upper += count[s];
        }
        return detail::two_sided_from_tails(lower / all, upper / all);
    }

    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    for (std::size_t t : ties) {
        const double tt = static_cast<double>(t);
        tie_term += tt * tt * tt - tt;
    }
    const double variance = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    if (variance <= 0.0) {
        return 1.0;
    }
    const double diff = v - mean;
    const double corrected = diff - 0.5 * (diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0));
    return std::min(1.0, detail::two_sided_normal(corrected / std::sqrt(variance)));
}

/// Vargha-Delaney A12: probability that a value from x exceeds one from y,
/// ties counting one half.
inline double a12(const std::vector<double> &x, const std::vector<double> &y) {
    require(!x.empty() && !y.empty(), "a12: samples must be non-empty");
    double wins = 0.0;
    for (double xi : x) {
        for (double yj : y) {
            if (xi > yj) {
                wins += 1.0;
            } else if (xi == yj) {
                wins += 0.5;
            }
        }
    }
    return wins / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

/// Effect-size bands, checked in the order large, medium, small.
inline EffectMagnitude classify_effect(double e) {
    require(e >= 0.0 && e <= 1.0, "classify_effect: effect size must be in [0,1]");
    if (e > 0.71 || e < 0.29) {
        return EffectMagnitude::Large;
    }
    if ((e > 0.64 && e <= 0.71) || (e >= 0.29 && e < 0.34)) {
        return EffectMagnitude::Medium;
    }
    if ((e >= 0.56 && e <= 0.64) || (e >= 0.34 && e <= 0.44)) {
        return EffectMagnitude::Small;
    }
    return EffectMagnitude::Negligible;
}

enum class TestKind { RankSum, SignedRank };

inline const char *to_string(TestKind t) { return t == TestKind::RankSum ? "ranksum" : "signedrank"; }

/// Full comparison of two samples (paired by position for the signed-rank test).
inline StatResult compare_samples(std::string label, const std::vector<double> &x, const std::vector<double> &y,
                                  TestKind test, double alpha) {
    StatResult r;
    r.pair_label = std::move(label);
    r.p_value = test == TestKind::RankSum ? wilcoxon_rank_sum(x, y) : wilcoxon_signed_rank(x, y);
    r.a12 = a12(x, y);
    r.magnitude = classify_effect(r.a12);
    r.significant = r.p_value < alpha;
    return r;
}

} // namespace cidbench
