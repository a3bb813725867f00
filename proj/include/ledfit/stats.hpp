#pragma once

// Statistical comparison of algorithm results: per-config summary
// statistics, the weight-based ranking, the two-sided Wilcoxon signed-rank
// test (zeros dropped, mid-ranks for ties, normal approximation with tie
// correction and continuity correction), and the before/after quality
// increase report.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ledfit {

struct SummaryStats {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation (n-1)
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

inline SummaryStats summary_stats(const std::vector<double>& values) {
    SummaryStats s;
    s.count = values.size();
    if (values.empty()) return s;
    s.min = values.front();
    s.max = values.front();
    double acc = 0.0;
    for (double v : values) {
        acc += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = acc / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

enum class RankCriterion { Best, Mean };

struct RankTable {
    std::vector<std::string> algorithms;
    std::vector<double> best_scores;  // same order as algorithms
    std::vector<double> mean_scores;
};

namespace detail {

/// Weights for one instance: the best algorithm of n gets n, the worst 1;
/// tied values share the mean of their tied positions.
inline std::vector<double> rank_weights(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
    std::vector<double> weights(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based, best first) share the mean weight
        double acc = 0.0;
        for (std::size_t k = i; k <= j; ++k) acc += static_cast<double>(n - k);
        const double w = acc / static_cast<double>(j - i + 1);
        for (std::size_t k = i; k <= j; ++k) weights[order[k]] = w;
        i = j + 1;
    }
    return weights;
}

}  // namespace detail

/// Weight-based ranking over per-instance results. `values[alg][instance]`
/// holds the rmsp values, possibly several per cell (repetitions): the Best
/// criterion ranks the minimum per cell, Mean ranks the average.
inline RankTable weighted_ranking(const std::vector<std::string>& algorithms,
                                  const std::vector<std::vector<std::vector<double>>>& values) {
    const std::size_t n_alg = algorithms.size();
    if (values.size() != n_alg) throw std::invalid_argument("weighted_ranking: shape mismatch");
    std::size_t n_inst = 0;
    for (const auto& per_alg : values) n_inst = std::max(n_inst, per_alg.size());

    RankTable table;
    table.algorithms = algorithms;
    table.best_scores.assign(n_alg, 0.0);
    table.mean_scores.assign(n_alg, 0.0);

    for (std::size_t inst = 0; inst < n_inst; ++inst) {
        std::vector<double> best(n_alg), mean(n_alg);
        for (std::size_t a = 0; a < n_alg; ++a) {
            if (inst >= values[a].size() || values[a][inst].empty())
                throw std::invalid_argument("weighted_ranking: missing cell");
            const auto& cell = values[a][inst];
            double lo = cell.front(), acc = 0.0;
            for (double v : cell) {
                lo = std::min(lo, v);
                acc += v;
            }
            best[a] = lo;
            mean[a] = acc / static_cast<double>(cell.size());
        }
        const auto wb = detail::rank_weights(best);
        const auto wm = detail::rank_weights(mean);
        for (std::size_t a = 0; a < n_alg; ++a) {
            table.best_scores[a] += wb[a];
            table.mean_scores[a] += wm[a];
        }
    }
    return table;
}

struct WilcoxonResult {
    std::size_t n_effective = 0;  // nonzero differences
    double w_statistic = 0.0;     // min(W+, W-)
    double asymptotic_p = 1.0;    // two-sided
};

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Two-sided Wilcoxon signed-rank test on paired samples.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("wilcoxon: length mismatch");
    std::vector<double> diff;
    diff.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diff.push_back(d);
    }
    if (diff.empty()) throw std::domain_error("wilcoxon: no nonzero pairs");

    const std::size_t n = diff.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(diff[a]) < std::abs(diff[b]);
    });

    std::vector<double> rank(n, 0.0);
    double tie_correction = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(diff[order[j + 1]]) == std::abs(diff[order[i]])) ++j;
        const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
        const double t = static_cast<double>(j - i + 1);
        tie_correction += t * t * t - t;
        i = j + 1;
    }

    double w_plus = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (diff[k] > 0.0) w_plus += rank[k];
    const double total = static_cast<double>(n) * (n + 1) / 2.0;
    const double w_minus = total - w_plus;

    WilcoxonResult res;
    res.n_effective = n;
    res.w_statistic = std::min(w_plus, w_minus);

    const double mean = total / 2.0;
    const double var =
        static_cast<double>(n) * (n + 1) * (2.0 * n + 1) / 24.0 - tie_correction / 48.0;
    if (var <= 0.0) {
        res.asymptotic_p = 1.0;  // every difference tied at one magnitude and sign
        return res;
    }
    // continuity-corrected two-sided p from the lower tail of min(W+, W-)
    const double z = (res.w_statistic - mean + 0.5) / std::sqrt(var);
    res.asymptotic_p = std::min(1.0, 2.0 * normal_cdf(z));
    return res;
}

/// Quality increase per instance: 100 * (before - after) / before.
inline std::vector<double> improvement_report(const std::vector<double>& before,
                                              const std::vector<double>& after) {
    if (before.size() != after.size()) throw std::invalid_argument("improvement: length mismatch");
    std::vector<double> delta(before.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before[i] == 0.0) throw std::domain_error("improvement: zero 'before' value");
        delta[i] = 100.0 * (before[i] - after[i]) / before[i];
    }
    return delta;
}

}  // namespace ledfit
