#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "crowdbandit/core.hpp"
#include "crowdbandit/rng.hpp"

namespace crowdbandit {

// Row-major numeric feature table, one row per task.
struct FeatureTable {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_cols, n_cols};
    }
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        const double diff = a[c] - b[c];
        d += diff * diff;
    }
    return d;
}

// z-score per column; constant columns map to zero.
inline FeatureTable standardize(const FeatureTable& features) {
    FeatureTable out{features.n_rows, features.n_cols,
                     std::vector<double>(features.values.size(), 0.0)};
    for (std::size_t c = 0; c < features.n_cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < features.n_rows; ++r) mean += features.values[r * features.n_cols + c];
        mean /= static_cast<double>(features.n_rows);
        double var = 0.0;
        for (std::size_t r = 0; r < features.n_rows; ++r) {
            const double d = features.values[r * features.n_cols + c] - mean;
            var += d * d;
        }
        var /= static_cast<double>(features.n_rows);
        const double sd = std::sqrt(var);
        if (sd > 0.0)
            for (std::size_t r = 0; r < features.n_rows; ++r)
                out.values[r * features.n_cols + c] =
                    (features.values[r * features.n_cols + c] - mean) / sd;
    }
    return out;
}

} // namespace detail

// Lloyd's algorithm with k-means++ seeding on z-scored features. Runs at
// most 100 iterations or until the largest centroid shift drops below 1e-6;
// an emptied cluster steals the point currently farthest from its centroid.
inline ContextAssignment kmeans_contexts(const FeatureTable& features, int s, std::uint64_t seed) {
    const std::size_t n = features.n_rows;
    const std::size_t d = features.n_cols;
    if (s < 1) throw std::invalid_argument("kmeans: need at least one cluster");
    if (n < static_cast<std::size_t>(s))
        throw std::invalid_argument("kmeans: fewer tasks than clusters");
    if (d < 1) throw std::invalid_argument("kmeans: need at least one feature column");

    const FeatureTable data = detail::standardize(features);
    {
        std::set<std::vector<double>> distinct;
        for (std::size_t i = 0; i < n; ++i) {
            distinct.emplace(data.row(i).begin(), data.row(i).end());
            if (distinct.size() >= static_cast<std::size_t>(s)) break;
        }
        if (distinct.size() < static_cast<std::size_t>(s))
            throw std::invalid_argument("kmeans: fewer distinct points than clusters");
    }

    Rng rng(seed);
    std::vector<double> centroids(static_cast<std::size_t>(s) * d);
    auto centroid = [&](int k) {
        return std::span<double>(centroids.data() + static_cast<std::size_t>(k) * d, d);
    };

    // k-means++: first centroid uniform, the rest proportional to the
    // squared distance from the nearest chosen centroid.
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = static_cast<std::size_t>(rng.uniform_index(static_cast<int>(n)));
        std::copy_n(data.row(first).begin(), d, centroid(0).begin());
    }
    for (int k = 1; k < s; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            min_dist[i] = std::min(min_dist[i], detail::squared_distance(data.row(i), centroid(k - 1)));
            total += min_dist[i];
        }
        std::size_t chosen = n - 1;
        if (total > 0.0) {
            const double u = rng.uniform01() * total;
            double cumulative = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cumulative += min_dist[i];
                if (u < cumulative) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = static_cast<std::size_t>(rng.uniform_index(static_cast<int>(n)));
        }
        std::copy_n(data.row(chosen).begin(), d, centroid(k).begin());
    }

    std::vector<int> assignment(n, 0);
    std::vector<double> point_dist(n, 0.0);
    auto assign_all = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_dist = detail::squared_distance(data.row(i), centroid(0));
            for (int k = 1; k < s; ++k) {
                const double dist = detail::squared_distance(data.row(i), centroid(k));
                if (dist < best_dist) {
                    best = k;
                    best_dist = dist;
                }
            }
            assignment[i] = best;
            point_dist[i] = best_dist;
        }
    };

    std::vector<double> sums(static_cast<std::size_t>(s) * d);
    std::vector<int> counts(s);
    for (int iter = 0; iter < 100; ++iter) {
        assign_all();
        // Repair empty clusters before the mean update.
        for (int k = 0; k < s; ++k) {
            if (std::find(assignment.begin(), assignment.end(), k) != assignment.end()) continue;
            std::size_t farthest = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (point_dist[i] > point_dist[farthest]) farthest = i;
            assignment[farthest] = k;
            point_dist[farthest] = 0.0;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const int k = assignment[i];
            ++counts[k];
            const auto row = data.row(i);
            for (std::size_t c = 0; c < d; ++c) sums[static_cast<std::size_t>(k) * d + c] += row[c];
        }
        double max_shift = 0.0;
        for (int k = 0; k < s; ++k) {
            double shift = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double updated = sums[static_cast<std::size_t>(k) * d + c] / counts[k];
                const double delta = updated - centroid(k)[c];
                shift += delta * delta;
                centroid(k)[c] = updated;
            }
            max_shift = std::max(max_shift, std::sqrt(shift));
        }
        if (max_shift < 1e-6) break;
    }
    assign_all();
    // A final repair pass keeps every context non-empty even if the last
    // assignment emptied one.
    for (int k = 0; k < s; ++k) {
        if (std::find(assignment.begin(), assignment.end(), k) != assignment.end()) continue;
        std::size_t farthest = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (point_dist[i] > point_dist[farthest]) farthest = i;
        assignment[farthest] = k;
        point_dist[farthest] = 0.0;
    }
    return ContextAssignment(s, std::move(assignment));
}

} // namespace crowdbandit
