#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbandit/core.hpp"
#include "crowdbandit/rng.hpp"

namespace crowdbandit {

enum class WorkerModelType {
    SpammerHammer,   // perfect on the expert context, a fair coin elsewhere
    OneCoin,         // 0.9 on the expert context, 0.6 elsewhere
    OneCoinMalicious // 0.9 expert, 0.3 on one bad context, 0.6 elsewhere
};

inline WorkerModelType parse_worker_model(std::string_view text) {
    if (text == "spammer-hammer") return WorkerModelType::SpammerHammer;
    if (text == "one-coin") return WorkerModelType::OneCoin;
    if (text == "one-coin-malicious") return WorkerModelType::OneCoinMalicious;
    throw std::invalid_argument("worker model: unknown name '" + std::string(text) +
                                "' (expected spammer-hammer, one-coin, one-coin-malicious)");
}

inline std::string worker_model_name(WorkerModelType type) {
    switch (type) {
        case WorkerModelType::SpammerHammer: return "spammer-hammer";
        case WorkerModelType::OneCoin: return "one-coin";
        case WorkerModelType::OneCoinMalicious: return "one-coin-malicious";
    }
    return "?";
}

// A worker population: the reliability model plus each worker's per-context
// role. accuracy_for() is the chance a worker reports the true label.
struct WorkerModel {
    WorkerModelType type = WorkerModelType::SpammerHammer;
    double good_accuracy = 0.9;
    double normal_accuracy = 0.6;
    double malicious_accuracy = 0.3;
    std::vector<int> good_context; // per worker
    std::vector<int> bad_context;  // per worker; -1 unless malicious

    int n_workers() const { return static_cast<int>(good_context.size()); }

    double accuracy_for(int worker, int context) const {
        if (type == WorkerModelType::SpammerHammer)
            return context == good_context[worker] ? 1.0 : 0.5;
        if (context == good_context[worker]) return good_accuracy;
        if (type == WorkerModelType::OneCoinMalicious && context == bad_context[worker])
            return malicious_accuracy;
        return normal_accuracy;
    }
};

// Draws each worker's expert context uniformly, except that the first
// min(k, s) workers cover contexts 0..s-1 round-robin so no context is left
// without an expert. Malicious workers additionally get a distinct bad
// context, uniform over the rest.
inline WorkerModel assign_expertise(int n_workers, int n_contexts, WorkerModelType type, Rng& rng) {
    if (n_workers < 1) throw std::invalid_argument("assign_expertise: need at least one worker");
    if (n_contexts < 1) throw std::invalid_argument("assign_expertise: need at least one context");
    if (type == WorkerModelType::OneCoinMalicious && n_contexts < 2)
        throw std::invalid_argument("assign_expertise: malicious model needs at least two contexts");
    WorkerModel model;
    model.type = type;
    model.good_context.resize(n_workers);
    model.bad_context.assign(n_workers, -1);
    for (int j = 0; j < n_workers; ++j)
        model.good_context[j] = j < n_contexts ? j : rng.uniform_index(n_contexts);
    if (type == WorkerModelType::OneCoinMalicious) {
        for (int j = 0; j < n_workers; ++j) {
            const int offset = 1 + rng.uniform_index(n_contexts - 1);
            model.bad_context[j] = (model.good_context[j] + offset) % n_contexts;
        }
    }
    return model;
}

// Full N x K matrix of simulated labels: each worker reports the true label
// with its per-context accuracy, otherwise the flipped label.
inline LabelMatrix generate_labels(const WorkerModel& model, const GroundTruth& truth,
                                   const ContextAssignment& contexts, Rng& rng) {
    if (truth.n_tasks() != contexts.n_tasks())
        throw std::invalid_argument("generate_labels: truth and contexts disagree on task count");
    LabelMatrix matrix(contexts.n_tasks(), model.n_workers());
    for (int i = 0; i < contexts.n_tasks(); ++i) {
        const int context = contexts.context_of(i);
        const int truth_label = truth.labels[i];
        for (int j = 0; j < model.n_workers(); ++j) {
            const double accuracy = model.accuracy_for(j, context);
            matrix.set(i, j, Label(rng.bernoulli(accuracy) ? truth_label : -truth_label));
        }
    }
    return matrix;
}

// Per-worker fraction of tasks labeled consistently with the truth.
inline std::vector<double> worker_true_accuracy(const LabelMatrix& matrix, const GroundTruth& truth) {
    if (!matrix.complete())
        throw std::invalid_argument("worker_true_accuracy: matrix has missing entries");
    if (truth.n_tasks() != matrix.n_tasks())
        throw std::invalid_argument("worker_true_accuracy: truth and matrix disagree on task count");
    std::vector<double> accuracy(matrix.n_workers(), 0.0);
    for (int i = 0; i < matrix.n_tasks(); ++i) {
        const auto row = matrix.row(i);
        for (int j = 0; j < matrix.n_workers(); ++j)
            if (row[j] == truth.labels[i]) accuracy[j] += 1.0;
    }
    for (double& a : accuracy) a /= matrix.n_tasks();
    return accuracy;
}

} // namespace crowdbandit
