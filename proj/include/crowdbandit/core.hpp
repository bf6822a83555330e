#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdbandit {

// Tasks, workers and contexts are dense 0-based indices throughout.

// A definite binary label. The value 0 ("missing") exists only inside
// LabelMatrix entries, never as a Label.
struct Label {
    int value;

    explicit Label(int v) : value(v) {
        if (v != -1 && v != +1)
            throw std::invalid_argument("Label: value must be -1 or +1, got " + std::to_string(v));
    }

    bool operator==(const Label&) const = default;
};

// Dense N x K grid of collected labels in {-1, 0, +1}; 0 means the
// (task, worker) pair has not been queried. Dimensions are fixed at
// construction; set() only lets 0 entries become definite.
class LabelMatrix {
  public:
    LabelMatrix(int n_tasks, int n_workers)
        : n_tasks_(n_tasks), n_workers_(n_workers),
          entries_(static_cast<std::size_t>(n_tasks) * n_workers, 0) {
        if (n_tasks <= 0 || n_workers <= 0)
            throw std::invalid_argument("LabelMatrix: dimensions must be positive");
    }

    // Raw-grid constructor for loaders; entries are not range-checked here
    // (validate_instance reports out-of-range entries).
    LabelMatrix(int n_tasks, int n_workers, std::vector<int> entries)
        : n_tasks_(n_tasks), n_workers_(n_workers), entries_(std::move(entries)) {
        if (n_tasks <= 0 || n_workers <= 0)
            throw std::invalid_argument("LabelMatrix: dimensions must be positive");
        if (entries_.size() != static_cast<std::size_t>(n_tasks) * n_workers)
            throw std::invalid_argument("LabelMatrix: entry count does not match dimensions");
    }

    int n_tasks() const { return n_tasks_; }
    int n_workers() const { return n_workers_; }

    int at(int task, int worker) const { return entries_[index(task, worker)]; }

    void set(int task, int worker, Label label) {
        int& cell = entries_[index(task, worker)];
        if (cell != 0)
            throw std::logic_error("LabelMatrix: entry (" + std::to_string(task) + "," +
                                   std::to_string(worker) + ") is already set");
        cell = label.value;
    }

    std::span<const int> row(int task) const {
        return {entries_.data() + static_cast<std::size_t>(task) * n_workers_,
                static_cast<std::size_t>(n_workers_)};
    }

    int labels_in_row(int task) const {
        int n = 0;
        for (int v : row(task)) n += (v != 0);
        return n;
    }

    bool complete() const {
        for (int v : entries_)
            if (v == 0) return false;
        return true;
    }

    const std::vector<int>& entries() const { return entries_; }

  private:
    std::size_t index(int task, int worker) const {
        if (task < 0 || task >= n_tasks_ || worker < 0 || worker >= n_workers_)
            throw std::out_of_range("LabelMatrix: index out of range");
        return static_cast<std::size_t>(task) * n_workers_ + worker;
    }

    int n_tasks_;
    int n_workers_;
    std::vector<int> entries_;
};

// Task -> context map plus per-context task counts.
class ContextAssignment {
  public:
    ContextAssignment(int n_contexts, std::vector<int> context_of)
        : n_contexts_(n_contexts), context_of_(std::move(context_of)), counts_(n_contexts, 0) {
        if (n_contexts <= 0)
            throw std::invalid_argument("ContextAssignment: need at least one context");
        for (int c : context_of_) {
            if (c < 0 || c >= n_contexts_)
                throw std::out_of_range("ContextAssignment: context id " + std::to_string(c) +
                                        " outside [0," + std::to_string(n_contexts_) + ")");
            ++counts_[c];
        }
    }

    int n_contexts() const { return n_contexts_; }
    int n_tasks() const { return static_cast<int>(context_of_.size()); }
    int context_of(int task) const { return context_of_.at(task); }
    int count(int context) const { return counts_.at(context); }
    const std::vector<int>& counts() const { return counts_; }
    const std::vector<int>& assignments() const { return context_of_; }

    std::vector<int> tasks_in(int context) const {
        std::vector<int> ids;
        for (int i = 0; i < n_tasks(); ++i)
            if (context_of_[i] == context) ids.push_back(i);
        return ids;
    }

  private:
    int n_contexts_;
    std::vector<int> context_of_;
    std::vector<int> counts_;
};

// S x K cumulative losses; entries only ever grow.
class LossTable {
  public:
    LossTable(int n_contexts, int n_workers)
        : n_contexts_(n_contexts), n_workers_(n_workers),
          losses_(static_cast<std::size_t>(n_contexts) * n_workers, 0.0) {
        if (n_contexts <= 0 || n_workers <= 0)
            throw std::invalid_argument("LossTable: dimensions must be positive");
    }

    int n_contexts() const { return n_contexts_; }
    int n_workers() const { return n_workers_; }

    double at(int context, int worker) const {
        return losses_[static_cast<std::size_t>(context) * n_workers_ + worker];
    }

    std::span<const double> row(int context) const {
        return {losses_.data() + static_cast<std::size_t>(context) * n_workers_,
                static_cast<std::size_t>(n_workers_)};
    }

    void add(int context, int worker, double delta) {
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw std::invalid_argument("LossTable: increment must be finite and >= 0");
        losses_[static_cast<std::size_t>(context) * n_workers_ + worker] += delta;
    }

    const std::vector<double>& values() const { return losses_; }

  private:
    int n_contexts_;
    int n_workers_;
    std::vector<double> losses_;
};

// Budget accounting: total T, the exploration share T1, and per-context
// adaptive step counters t^s.
struct BudgetLedger {
    long long total = 0;             // T
    long long exploration_spent = 0; // T1 once exploration ran
    long long adaptive_spent = 0;
    std::vector<long long> context_steps; // t^s per context

    long long spent() const { return exploration_spent + adaptive_spent; }
    long long remaining() const { return total - spent(); }
};

// True labels, used only by worker simulation and evaluation.
struct GroundTruth {
    std::vector<int> labels; // each -1 or +1

    int n_tasks() const { return static_cast<int>(labels.size()); }
};

// Checks the cross-type invariants; returns the first violation found,
// or nullopt when everything is consistent.
inline std::optional<std::string> validate_instance(const LabelMatrix& matrix,
                                                    const ContextAssignment& contexts,
                                                    const BudgetLedger& ledger,
                                                    const GroundTruth* truth = nullptr) {
    if (contexts.n_tasks() != matrix.n_tasks())
        return "dimension mismatch: matrix has " + std::to_string(matrix.n_tasks()) +
               " tasks but context assignment has " + std::to_string(contexts.n_tasks());
    if (truth && truth->n_tasks() != matrix.n_tasks())
        return "dimension mismatch: matrix has " + std::to_string(matrix.n_tasks()) +
               " tasks but ground truth has " + std::to_string(truth->n_tasks());
    for (int i = 0; i < matrix.n_tasks(); ++i)
        for (int v : matrix.row(i))
            if (v != -1 && v != 0 && v != +1)
                return "label out of range: entry " + std::to_string(v) + " in task " +
                       std::to_string(i) + " row";
    for (int s = 0; s < contexts.n_contexts(); ++s)
        if (contexts.count(s) == 0)
            return "empty context: context " + std::to_string(s) + " has no tasks";
    if (truth)
        for (int v : truth->labels)
            if (v != -1 && v != +1) return "ground-truth label out of range: " + std::to_string(v);
    if (ledger.exploration_spent >= ledger.total)
        return "budget too small: exploration budget " + std::to_string(ledger.exploration_spent) +
               " must be below total " + std::to_string(ledger.total);
    if (ledger.spent() > ledger.total)
        return "budget overrun: spent " + std::to_string(ledger.spent()) + " of " +
               std::to_string(ledger.total);
    if (!ledger.context_steps.empty()) {
        if (static_cast<int>(ledger.context_steps.size()) != contexts.n_contexts())
            return "dimension mismatch: ledger tracks " + std::to_string(ledger.context_steps.size()) +
                   " contexts, assignment has " + std::to_string(contexts.n_contexts());
        const long long steps = std::accumulate(ledger.context_steps.begin(),
                                                ledger.context_steps.end(), 0LL);
        if (steps != ledger.adaptive_spent)
            return "ledger mismatch: context steps sum to " + std::to_string(steps) +
                   " but adaptive spend is " + std::to_string(ledger.adaptive_spent);
    }
    return std::nullopt;
}

} // namespace crowdbandit
