#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbandit/aggregation.hpp"
#include "crowdbandit/core.hpp"
#include "crowdbandit/rng.hpp"

namespace crowdbandit {

enum class StrategyType {
    LeastConfidence,
    MarginSampling,
    InfoDensityLC,
    InfoDensityMS,
    Random,
};

// A task-selection policy. Config/CLI spelling: lc, ms, id-lc:<beta>,
// id-ms:<beta>, random.
struct StrategyKind {
    StrategyType type = StrategyType::LeastConfidence;
    double beta = 0.0; // density exponent, ID variants only

    static StrategyKind parse(std::string_view text);
    std::string name() const;
};

inline StrategyKind StrategyKind::parse(std::string_view text) {
    auto parse_beta = [&](std::string_view spec) {
        const std::string s(spec);
        std::size_t used = 0;
        double b = 0.0;
        try {
            b = std::stod(s, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("strategy: bad beta in '" + std::string(text) + "'");
        }
        if (used != s.size() || !std::isfinite(b) || b < 0.0)
            throw std::invalid_argument("strategy: beta must be a finite non-negative number in '" +
                                        std::string(text) + "'");
        return b;
    };
    if (text == "lc") return {StrategyType::LeastConfidence, 0.0};
    if (text == "ms") return {StrategyType::MarginSampling, 0.0};
    if (text == "random") return {StrategyType::Random, 0.0};
    if (text.starts_with("id-lc:"))
        return {StrategyType::InfoDensityLC, parse_beta(text.substr(6))};
    if (text.starts_with("id-ms:"))
        return {StrategyType::InfoDensityMS, parse_beta(text.substr(6))};
    throw std::invalid_argument("strategy: unknown name '" + std::string(text) +
                                "' (expected lc, ms, id-lc:<beta>, id-ms:<beta>, random)");
}

inline std::string StrategyKind::name() const {
    char buf[64];
    switch (type) {
        case StrategyType::LeastConfidence: return "lc";
        case StrategyType::MarginSampling: return "ms";
        case StrategyType::Random: return "random";
        case StrategyType::InfoDensityLC:
            std::snprintf(buf, sizeof buf, "id-lc:%g", beta);
            return buf;
        case StrategyType::InfoDensityMS:
            std::snprintf(buf, sizeof buf, "id-ms:%g", beta);
            return buf;
    }
    return "?";
}

// Information-density priority: (1 - confidence) * (N^s / N)^beta. Larger
// values are picked first; beta = 0 reduces to plain uncertainty.
inline double id_score(double confidence, int context_count, int total_tasks, double beta) {
    if (context_count < 1 || context_count > total_tasks)
        throw std::invalid_argument("id_score: context count must be in [1, total_tasks]");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("id_score: beta must be finite and >= 0");
    const double density = static_cast<double>(context_count) / total_tasks;
    return (1.0 - confidence) * std::pow(density, beta);
}

// Picks the next task to label. LC/MS take the candidate with the lowest
// confidence, ID variants the highest id_score, Random a uniform draw.
// Score ties go to the smallest task id. All four deterministic policies
// share one argmax-over-key scan: the LC/MS keys are (1 - confidence), so
// the selections of id-*:0 and the plain strategies coincide exactly.
inline int select_task(const StrategyKind& kind, std::span<const int> candidates,
                       std::span<const TaskScores> scores_by_task,
                       const ContextAssignment& contexts, Rng& rng) {
    if (candidates.empty()) throw std::invalid_argument("select_task: no candidates left");

    if (kind.type == StrategyType::Random)
        return candidates[rng.uniform_index(static_cast<int>(candidates.size()))];

    const int total = contexts.n_tasks();
    auto key = [&](int task) {
        const TaskScores& s = scores_by_task[task];
        switch (kind.type) {
            case StrategyType::LeastConfidence: return 1.0 - confidence_lc(s);
            case StrategyType::MarginSampling: return 1.0 - confidence_ms(s);
            case StrategyType::InfoDensityLC:
                return id_score(confidence_lc(s), contexts.count(contexts.context_of(task)), total,
                                kind.beta);
            case StrategyType::InfoDensityMS:
                return id_score(confidence_ms(s), contexts.count(contexts.context_of(task)), total,
                                kind.beta);
            default: break;
        }
        throw std::logic_error("select_task: unhandled strategy");
    };

    int best = candidates[0];
    double best_key = key(best);
    for (std::size_t c = 1; c < candidates.size(); ++c) {
        const int task = candidates[c];
        const double k = key(task);
        if (k > best_key) {
            best = task;
            best_key = k;
        }
    }
    return best;
}

inline std::vector<StrategyKind> parse_strategy_list(std::string_view text) {
    std::vector<StrategyKind> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        const auto item = text.substr(start, comma - start);
        if (!item.empty()) out.push_back(StrategyKind::parse(item));
        start = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("strategy: empty strategy list");
    return out;
}

} // namespace crowdbandit
