#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <stdexcept>

#include "crowdbandit/core.hpp"
#include "crowdbandit/rng.hpp"

namespace crowdbandit {

// Fraction of total worker weight voting +1 / -1 on a task. Missing labels
// contribute to neither, so positive + negative <= 1.
struct TaskScores {
    double positive = 0.0;
    double negative = 0.0;
};

namespace detail {

struct WeightedSums {
    double positive = 0.0; // weight behind +1 labels
    double negative = 0.0; // weight behind -1 labels
    double total = 0.0;    // all weights, labeled or not
};

inline WeightedSums weighted_sums(std::span<const int> labels, std::span<const double> weights) {
    if (labels.empty()) throw std::invalid_argument("aggregation: need at least one worker");
    if (labels.size() != weights.size())
        throw std::invalid_argument("aggregation: labels and weights differ in length");
    WeightedSums sums;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const double w = weights[j];
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("aggregation: weights must be positive and finite");
        sums.total += w;
        if (labels[j] == +1)
            sums.positive += w;
        else if (labels[j] == -1)
            sums.negative += w;
    }
    return sums;
}

} // namespace detail

inline TaskScores task_scores(std::span<const int> labels, std::span<const double> weights) {
    const auto sums = detail::weighted_sums(labels, weights);
    return {sums.positive / sums.total, sums.negative / sums.total};
}

// Sign of the weight-normalized label sum; a zero sum falls to a fair coin
// from the caller's randomness source. Comparing the positive and negative
// weight masses directly is the same sign test without the cancellation.
inline Label weighted_vote(std::span<const int> labels, std::span<const double> weights,
                           Rng& tie_break) {
    const auto sums = detail::weighted_sums(labels, weights);
    if (sums.positive > sums.negative) return Label(+1);
    if (sums.positive < sums.negative) return Label(-1);
    return Label(tie_break.coin_label());
}

inline Label majority_vote(std::span<const int> labels, Rng& tie_break) {
    if (labels.empty()) throw std::invalid_argument("majority_vote: need at least one worker");
    long long sum = 0;
    for (int v : labels) sum += v;
    if (sum > 0) return Label(+1);
    if (sum < 0) return Label(-1);
    return Label(tie_break.coin_label());
}

// Score of the more probable label.
inline double confidence_lc(const TaskScores& scores) {
    return scores.positive > scores.negative ? scores.positive : scores.negative;
}

// Margin between the two labels; equals |sum_j w_j y_j| / sum_j w_j.
inline double confidence_ms(const TaskScores& scores) {
    return std::abs(scores.positive - scores.negative);
}

} // namespace crowdbandit
