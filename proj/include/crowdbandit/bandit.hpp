#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "crowdbandit/aggregation.hpp"
#include "crowdbandit/core.hpp"
#include "crowdbandit/rng.hpp"
#include "crowdbandit/strategies.hpp"

namespace crowdbandit {

// Answers one label query. Must answer the same (task, worker) pair
// consistently within a run; the engine never repeats a pair anyway.
using LabelOracle = std::function<Label(int task, int worker)>;

struct WorkerDraw {
    int worker = -1;
    double probability = 0.0; // normalized weight of the drawn worker at draw time
};

enum class Phase { Exploration, Adaptive };

// One label request. `loss` is the observed 0/1 disagreement with the vote;
// replaying a log accumulates loss/probability per (context, worker).
struct Event {
    long long step = 0; // 1-based over the whole run
    Phase phase = Phase::Exploration;
    int task = -1;
    int context = -1;
    int worker = -1;
    double probability = 1.0;
    int label = 0; // -1/+1
    int vote = 0;  // -1/+1, the aggregate estimate used to score this label
    int loss = 0;  // 1 iff label != vote
};

// Anytime exponential-weights rate, sqrt(ln K / (t K)).
inline double learning_rate(long long context_steps, int n_workers, double scale = 1.0) {
    if (context_steps < 1) throw std::invalid_argument("learning_rate: step count must be >= 1");
    if (n_workers < 2) throw std::invalid_argument("learning_rate: need at least two workers");
    if (!(scale > 0.0)) throw std::invalid_argument("learning_rate: scale must be positive");
    return scale * std::sqrt(std::log(static_cast<double>(n_workers)) /
                             (static_cast<double>(context_steps) * n_workers));
}

// w_j = exp(-eta * L_j). The exponent is never positive, so no overflow;
// results are floored at the smallest normal double to keep every weight
// strictly positive under extreme cumulative losses.
inline std::vector<double> compute_weights(std::span<const double> losses, double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("compute_weights: eta must be positive and finite");
    std::vector<double> weights(losses.size());
    for (std::size_t j = 0; j < losses.size(); ++j) {
        const double loss = losses[j];
        if (!(loss >= 0.0) || !std::isfinite(loss))
            throw std::invalid_argument("compute_weights: losses must be finite and >= 0");
        weights[j] = std::max(std::exp(-eta * loss), std::numeric_limits<double>::min());
    }
    return weights;
}

// Draws one worker from `eligible` with probability proportional to its
// weight, and reports that exact probability.
inline WorkerDraw select_worker(std::span<const double> weights, std::span<const int> eligible,
                                Rng& rng) {
    if (eligible.empty()) throw std::invalid_argument("select_worker: no eligible workers");
    double total = 0.0;
    for (int j : eligible) {
        const double w = weights[j];
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("select_worker: weights must be positive and finite");
        total += w;
    }
    const double u = rng.uniform01() * total;
    double cumulative = 0.0;
    int chosen = eligible.back();
    for (int j : eligible) {
        cumulative += weights[j];
        if (u < cumulative) {
            chosen = j;
            break;
        }
    }
    return {chosen, weights[chosen] / total};
}

// Importance-weighted update: only the drawn worker is charged, by
// observed_loss / probability, which is unbiased for every worker.
inline void loss_update(int observed_loss, const WorkerDraw& draw, LossTable& losses, int context) {
    if (observed_loss != 0 && observed_loss != 1)
        throw std::invalid_argument("loss_update: observed loss must be 0 or 1");
    if (!(draw.probability > 0.0) || draw.probability > 1.0)
        throw std::invalid_argument("loss_update: draw probability must be in (0,1]");
    if (observed_loss == 0) return;
    losses.add(context, draw.worker, observed_loss / draw.probability);
}

struct ExplorationResult {
    LossTable losses;          // initial cumulative losses L^s_{j,0}
    std::vector<int> explored; // task ids, in draw order
    long long labels_collected = 0;
    std::vector<Event> events; // one per label request
};

// Batch phase: N' tasks per context, drawn uniformly without replacement,
// each labeled by all K workers; losses count disagreements with the
// per-task majority vote. Fills `matrix` with the collected labels.
inline ExplorationResult pure_exploration(const ContextAssignment& contexts, int n_workers,
                                          const LabelOracle& oracle, int n_prime, Rng& rng,
                                          LabelMatrix& matrix, long long first_step = 1) {
    if (n_prime < 1) throw std::invalid_argument("pure_exploration: N' must be >= 1");
    const int n_contexts = contexts.n_contexts();
    ExplorationResult result{LossTable(n_contexts, n_workers), {}, 0, {}};
    long long step = first_step;
    for (int s = 0; s < n_contexts; ++s) {
        std::vector<int> pool = contexts.tasks_in(s);
        if (static_cast<int>(pool.size()) < n_prime)
            throw std::invalid_argument("pure_exploration: context " + std::to_string(s) + " has " +
                                        std::to_string(pool.size()) + " tasks, need N'=" +
                                        std::to_string(n_prime));
        // Partial Fisher-Yates: the first n_prime entries are a uniform
        // sample without replacement.
        for (int t = 0; t < n_prime; ++t)
            std::swap(pool[t], pool[t + rng.uniform_index(static_cast<int>(pool.size()) - t)]);
        for (int t = 0; t < n_prime; ++t) {
            const int task = pool[t];
            result.explored.push_back(task);
            const std::size_t first_event = result.events.size();
            for (int j = 0; j < n_workers; ++j) {
                const Label label = oracle(task, j);
                matrix.set(task, j, label);
                result.events.push_back({step++, Phase::Exploration, task, s, j, 1.0, label.value, 0, 0});
                ++result.labels_collected;
            }
            const Label vote = majority_vote(matrix.row(task), rng);
            for (std::size_t e = first_event; e < result.events.size(); ++e) {
                Event& ev = result.events[e];
                ev.vote = vote.value;
                ev.loss = (ev.label != vote.value) ? 1 : 0;
                result.losses.add(s, ev.worker, ev.loss);
            }
        }
    }
    return result;
}

struct RunConfig {
    int n_prime = 1;
    long long total_budget = 0; // T
    double eta_scale = 1.0;
    bool debug_full_rescore = false; // revalidate the whole score cache after each step
};

// The two-phase assignment engine. Owns all run state exclusively; one
// instance per run, single-threaded.
class Engine {
  public:
    Engine(const ContextAssignment& contexts, int n_workers, LabelOracle oracle,
           const StrategyKind& strategy, const RunConfig& config, std::uint64_t policy_seed)
        : contexts_(&contexts), n_workers_(n_workers), oracle_(std::move(oracle)),
          strategy_(strategy), config_(config), rng_(policy_seed),
          matrix_(contexts.n_tasks(), n_workers),
          losses_(contexts.n_contexts(), n_workers),
          scores_(contexts.n_tasks()) {
        if (n_workers_ < 2) throw std::invalid_argument("Engine: need at least two workers");
        const long long t1 = static_cast<long long>(contexts.n_contexts()) * n_workers_ * config_.n_prime;
        if (t1 >= config_.total_budget)
            throw std::invalid_argument("Engine: budget too small, exploration needs " +
                                        std::to_string(t1) + " of " +
                                        std::to_string(config_.total_budget) + " units");
        ledger_.total = config_.total_budget;
        ledger_.context_steps.assign(contexts.n_contexts(), 0);
    }

    void run_exploration() {
        if (exploration_done_) throw std::logic_error("Engine: exploration already ran");
        auto result = pure_exploration(*contexts_, n_workers_, oracle_, config_.n_prime, rng_, matrix_);
        losses_ = std::move(result.losses);
        ledger_.exploration_spent = result.labels_collected;
        events_ = std::move(result.events);
        std::vector<char> explored(contexts_->n_tasks(), 0);
        for (int task : result.explored) explored[task] = 1;
        for (int i = 0; i < contexts_->n_tasks(); ++i)
            if (!explored[i]) candidates_.push_back(i);
        for (int s = 0; s < contexts_->n_contexts(); ++s) refresh_context_scores(s);
        exploration_done_ = true;
    }

    bool finished() const {
        return !exploration_done_ || ledger_.remaining() <= 0 || candidates_.empty();
    }

    // One adaptive step: pick task, draw worker, collect the label, score it
    // against the weighted vote, update losses and the affected context's
    // cached task scores. Returns false once the budget or candidate pool
    // is exhausted.
    bool step() {
        if (!exploration_done_) throw std::logic_error("Engine: run exploration first");
        if (finished()) return false;

        const int task = select_task(strategy_, candidates_, scores_, *contexts_, rng_);
        const int context = contexts_->context_of(task);
        const long long t_s = ++ledger_.context_steps[context];
        const double eta = learning_rate(t_s, n_workers_, config_.eta_scale);
        const std::vector<double> weights = compute_weights(losses_.row(context), eta);

        std::vector<int> eligible;
        for (int j = 0; j < n_workers_; ++j)
            if (matrix_.at(task, j) == 0) eligible.push_back(j);
        const WorkerDraw draw = select_worker(weights, eligible, rng_);

        const Label label = oracle_(task, draw.worker);
        matrix_.set(task, draw.worker, label);
        const Label vote = weighted_vote(matrix_.row(task), weights, rng_);
        const int loss = (label != vote) ? 1 : 0;
        loss_update(loss, draw, losses_, context);
        ++ledger_.adaptive_spent;
        events_.push_back({ledger_.spent(), Phase::Adaptive, task, context, draw.worker,
                           draw.probability, label.value, vote.value, loss});

        refresh_context_scores(context);
        if (matrix_.labels_in_row(task) == n_workers_)
            candidates_.erase(std::lower_bound(candidates_.begin(), candidates_.end(), task));
        if (config_.debug_full_rescore) assert_scores_consistent();
        return true;
    }

    void run_to_completion() {
        if (!exploration_done_) run_exploration();
        while (step()) {}
    }

    // Weights the engine would use for the next step in `context`.
    std::vector<double> next_weights(int context) const {
        const double eta = learning_rate(ledger_.context_steps.at(context) + 1, n_workers_,
                                         config_.eta_scale);
        return compute_weights(losses_.row(context), eta);
    }

    // Current weighted-vote estimate for every task, exploration tasks
    // included; unlabeled or balanced tasks fall to the tie-break source.
    std::vector<int> estimate_all(Rng& tie_break) const {
        std::vector<std::vector<double>> weights(contexts_->n_contexts());
        for (int s = 0; s < contexts_->n_contexts(); ++s) weights[s] = next_weights(s);
        std::vector<int> estimates(contexts_->n_tasks());
        for (int i = 0; i < contexts_->n_tasks(); ++i)
            estimates[i] = weighted_vote(matrix_.row(i), weights[contexts_->context_of(i)],
                                         tie_break).value;
        return estimates;
    }

    int unlabeled_count() const {
        int n = 0;
        for (int i = 0; i < contexts_->n_tasks(); ++i)
            if (matrix_.labels_in_row(i) == 0) ++n;
        return n;
    }

    long long budget_shortfall() const { return ledger_.remaining(); }

    const ContextAssignment& contexts() const { return *contexts_; }
    int n_workers() const { return n_workers_; }
    const LabelMatrix& matrix() const { return matrix_; }
    const LossTable& losses() const { return losses_; }
    const BudgetLedger& ledger() const { return ledger_; }
    const std::vector<int>& candidates() const { return candidates_; }
    const std::vector<TaskScores>& scores() const { return scores_; }
    const std::vector<Event>& events() const { return events_; }

  private:
    void refresh_context_scores(int context) {
        const std::vector<double> weights = next_weights(context);
        for (int task : candidates_)
            if (contexts_->context_of(task) == context)
                scores_[task] = task_scores(matrix_.row(task), weights);
    }

    void assert_scores_consistent() const {
        for (int s = 0; s < contexts_->n_contexts(); ++s) {
            const std::vector<double> weights = next_weights(s);
            for (int task : candidates_) {
                if (contexts_->context_of(task) != s) continue;
                const TaskScores fresh = task_scores(matrix_.row(task), weights);
                if (std::abs(fresh.positive - scores_[task].positive) > 1e-12 ||
                    std::abs(fresh.negative - scores_[task].negative) > 1e-12)
                    throw std::logic_error("Engine: stale score cache for task " +
                                           std::to_string(task));
            }
        }
    }

    const ContextAssignment* contexts_;
    int n_workers_;
    LabelOracle oracle_;
    StrategyKind strategy_;
    RunConfig config_;
    Rng rng_;
    LabelMatrix matrix_;
    LossTable losses_;
    BudgetLedger ledger_;
    std::vector<int> candidates_; // ascending task ids still open for labeling
    std::vector<TaskScores> scores_;
    std::vector<Event> events_;
    bool exploration_done_ = false;
};

// Accumulates the loss table an event log implies: exploration events add
// the recorded 0/1 loss, adaptive events add loss / probability.
inline LossTable replay_losses(std::span<const Event> events, int n_contexts, int n_workers) {
    LossTable losses(n_contexts, n_workers);
    for (const Event& ev : events) {
        if (ev.phase == Phase::Exploration)
            losses.add(ev.context, ev.worker, ev.loss);
        else
            losses.add(ev.context, ev.worker, ev.loss / ev.probability);
    }
    return losses;
}

} // namespace crowdbandit
