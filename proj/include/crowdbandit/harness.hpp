#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crowdbandit/bandit.hpp"
#include "crowdbandit/core.hpp"
#include "crowdbandit/csv.hpp"
#include "crowdbandit/kmeans.hpp"
#include "crowdbandit/rng.hpp"
#include "crowdbandit/simulation.hpp"
#include "crowdbandit/strategies.hpp"

namespace crowdbandit {

struct ExperimentConfig {
    // Simulate mode: feature CSV clustered into n_contexts, workers simulated.
    std::string features_path;
    bool csv_has_header = false;
    int n_contexts = 3;
    int n_workers = 30;
    WorkerModelType model = WorkerModelType::SpammerHammer;
    // Real-data mode: a complete label matrix plus truth (and optional contexts).
    std::string labels_path;
    std::string truth_path;
    std::string context_path;

    std::vector<StrategyKind> strategies;
    int n_prime = 1;
    int budget_mult = 15; // T = budget_mult * N
    int checkpoints = 30;
    int runs = 30;
    std::uint64_t base_seed = 1;
    double eta_scale = 1.0;
    bool write_events = true;
};

// A prepared problem: contexts and truth are fixed for the whole experiment;
// fixed_labels is set in real-data mode (simulate mode regenerates workers
// and labels per run).
struct Instance {
    ContextAssignment contexts;
    GroundTruth truth;
    std::optional<LabelMatrix> fixed_labels;
    int n_workers = 0;
    WorkerModelType model = WorkerModelType::SpammerHammer;
};

struct RunResult {
    std::string strategy;
    std::uint64_t seed = 0;
    std::vector<std::pair<long long, double>> accuracy_at;
    bool assignment_failure = false;
    int unlabeled_count = 0;
    std::vector<Event> events;
};

struct CheckpointStat {
    long long budget = 0;
    double mean = 0.0;    // over non-failed runs
    double stderr_ = 0.0; // sample stddev / sqrt(non-failed runs)
    int n_failed = 0;
};

struct CurveSummary {
    std::string strategy;
    std::vector<CheckpointStat> points;
};

struct StrategyOutcome {
    StrategyKind kind;
    CurveSummary curve;
    std::vector<RunResult> runs;
};

struct ExperimentResult {
    std::vector<StrategyOutcome> outcomes;
};

inline double accuracy(std::span<const int> estimates, const GroundTruth& truth) {
    if (estimates.size() != truth.labels.size())
        throw std::invalid_argument("accuracy: estimate and truth lengths differ");
    if (estimates.empty()) throw std::invalid_argument("accuracy: empty input");
    int correct = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i)
        correct += (estimates[i] == truth.labels[i]);
    return static_cast<double>(correct) / static_cast<double>(estimates.size());
}

// Weighted-vote accuracy of the engine's current beliefs over all N tasks.
inline double evaluate_checkpoint(const Engine& engine, const GroundTruth& truth, Rng& tie_break) {
    const auto estimates = engine.estimate_all(tie_break);
    return accuracy(estimates, truth);
}

// `count` budgets evenly spaced over [t1, total], endpoints included.
inline std::vector<long long> checkpoint_budgets(long long t1, long long total, int count) {
    if (count < 1) throw std::invalid_argument("checkpoint_budgets: need at least one checkpoint");
    if (t1 > total) throw std::invalid_argument("checkpoint_budgets: t1 exceeds total");
    std::vector<long long> budgets;
    if (count == 1) {
        budgets.push_back(total);
        return budgets;
    }
    for (int k = 0; k < count; ++k) {
        const long long b =
            t1 + static_cast<long long>(std::llround(static_cast<double>(k) *
                                                     static_cast<double>(total - t1) / (count - 1)));
        if (budgets.empty() || b > budgets.back()) budgets.push_back(b);
    }
    return budgets;
}

inline std::string sanitize_for_filename(std::string name) {
    for (char& c : name)
        if (c == ':' || c == '/' || c == '\\') c = '_';
    return name;
}

namespace detail {

inline LabelOracle matrix_oracle(const LabelMatrix& matrix) {
    return [&matrix](int task, int worker) { return Label(matrix.at(task, worker)); };
}

} // namespace detail

inline Instance prepare_instance(const ExperimentConfig& config) {
    if (!config.labels_path.empty()) {
        auto loaded = load_label_matrix(config.labels_path, config.truth_path,
                                        config.context_path.empty()
                                            ? std::nullopt
                                            : std::optional<std::string>(config.context_path));
        Instance instance{std::move(loaded.contexts), std::move(loaded.truth),
                          std::move(loaded.matrix), 0, config.model};
        instance.n_workers = instance.fixed_labels->n_workers();
        BudgetLedger placeholder;
        placeholder.total = 1; // instance-only check, budget is validated at run time
        if (auto violation = validate_instance(*instance.fixed_labels, instance.contexts,
                                               placeholder, &instance.truth))
            throw std::runtime_error("invalid instance: " + *violation);
        return instance;
    }
    if (config.features_path.empty())
        throw std::invalid_argument("config: need either a features file or a label matrix");
    auto [features, truth] = load_features(config.features_path, config.csv_has_header);
    ContextAssignment contexts = kmeans_contexts(features, config.n_contexts, config.base_seed);
    return {std::move(contexts), std::move(truth), std::nullopt, config.n_workers, config.model};
}

// The full matrix a run's workers would produce; simulate mode regenerates
// it from the run seed, real-data mode reuses the loaded matrix.
inline LabelMatrix run_label_matrix(const Instance& instance, std::uint64_t run_seed) {
    if (instance.fixed_labels) return *instance.fixed_labels;
    Rng rng(mix_seed(run_seed, kInstanceStream));
    const WorkerModel model =
        assign_expertise(instance.n_workers, instance.contexts.n_contexts(), instance.model, rng);
    return generate_labels(model, instance.truth, instance.contexts, rng);
}

inline RunResult run_single(const Instance& instance, const StrategyKind& kind,
                            const ExperimentConfig& config, std::uint64_t run_seed) {
    const LabelMatrix labels = run_label_matrix(instance, run_seed);
    const long long total_budget =
        static_cast<long long>(config.budget_mult) * instance.contexts.n_tasks();
    RunConfig run_config{config.n_prime, total_budget, config.eta_scale, false};
    Engine engine(instance.contexts, instance.n_workers ? instance.n_workers : labels.n_workers(),
                  detail::matrix_oracle(labels), kind, run_config, mix_seed(run_seed, kPolicyStream));
    engine.run_exploration();

    RunResult result;
    result.strategy = kind.name();
    result.seed = run_seed;
    const auto budgets =
        checkpoint_budgets(engine.ledger().exploration_spent, total_budget, config.checkpoints);
    std::size_t next = 0;
    auto record_due = [&] {
        while (next < budgets.size() && budgets[next] <= engine.ledger().spent()) {
            Rng tie_break(mix_seed(run_seed, kEvalStream, static_cast<std::uint64_t>(budgets[next])));
            result.accuracy_at.emplace_back(budgets[next],
                                            evaluate_checkpoint(engine, instance.truth, tie_break));
            ++next;
        }
    };
    record_due();
    while (engine.step()) record_due();
    // Early termination (empty candidate pool): later checkpoints see the
    // final state, which no further labeling could change.
    while (next < budgets.size()) {
        Rng tie_break(mix_seed(run_seed, kEvalStream, static_cast<std::uint64_t>(budgets[next])));
        result.accuracy_at.emplace_back(budgets[next],
                                        evaluate_checkpoint(engine, instance.truth, tie_break));
        ++next;
    }
    result.unlabeled_count = engine.unlabeled_count();
    result.assignment_failure = result.unlabeled_count > 0;
    result.events = engine.events();
    return result;
}

inline CurveSummary summarize_runs(const std::string& strategy, std::span<const RunResult> runs) {
    CurveSummary summary;
    summary.strategy = strategy;
    if (runs.empty()) return summary;
    const std::size_t n_checkpoints = runs.front().accuracy_at.size();
    int n_failed = 0;
    for (const RunResult& run : runs) n_failed += run.assignment_failure;
    for (std::size_t c = 0; c < n_checkpoints; ++c) {
        CheckpointStat stat;
        stat.budget = runs.front().accuracy_at[c].first;
        stat.n_failed = n_failed;
        double sum = 0.0;
        int n_clean = 0;
        for (const RunResult& run : runs) {
            if (run.assignment_failure) continue;
            sum += run.accuracy_at[c].second;
            ++n_clean;
        }
        if (n_clean == 0) {
            stat.mean = std::numeric_limits<double>::quiet_NaN();
            stat.stderr_ = std::numeric_limits<double>::quiet_NaN();
        } else {
            stat.mean = sum / n_clean;
            double ss = 0.0;
            for (const RunResult& run : runs) {
                if (run.assignment_failure) continue;
                const double d = run.accuracy_at[c].second - stat.mean;
                ss += d * d;
            }
            stat.stderr_ = n_clean > 1 ? std::sqrt(ss / (n_clean - 1)) / std::sqrt(n_clean) : 0.0;
        }
        summary.points.push_back(stat);
    }
    return summary;
}

// Runs every configured strategy for `runs` seeded repetitions. Run r uses
// seed base_seed + r for its instance, policy and evaluation streams, so a
// strategy's results do not depend on which other strategies run.
inline ExperimentResult run_experiment(const ExperimentConfig& config, const Instance& instance) {
    if (config.runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (config.checkpoints < 1) throw std::invalid_argument("config: checkpoints must be >= 1");
    if (config.strategies.empty()) throw std::invalid_argument("config: no strategies given");
    const long long total_budget =
        static_cast<long long>(config.budget_mult) * instance.contexts.n_tasks();
    const long long t1 = static_cast<long long>(instance.contexts.n_contexts()) *
                         instance.n_workers * config.n_prime;
    if (total_budget <= t1)
        throw std::invalid_argument("config: budget " + std::to_string(total_budget) +
                                    " does not cover exploration " + std::to_string(t1));
    ExperimentResult result;
    for (const StrategyKind& kind : config.strategies) {
        StrategyOutcome outcome;
        outcome.kind = kind;
        for (int r = 1; r <= config.runs; ++r)
            outcome.runs.push_back(run_single(instance, kind, config, config.base_seed + r));
        outcome.curve = summarize_runs(kind.name(), outcome.runs);
        result.outcomes.push_back(std::move(outcome));
    }
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
    const Instance instance = prepare_instance(config);
    return run_experiment(config, instance);
}

struct SweepRow {
    double beta = 0.0;
    double final_accuracy = 0.0; // NaN when no run finished cleanly
    double stderr_ = 0.0;
    int n_failed = 0;
};

struct SweepResult {
    std::string base; // lc or ms
    std::vector<SweepRow> rows;
    ExperimentResult experiment;
};

// Final-budget accuracy of ID(base, beta) for each beta; rows with no clean
// run carry NaN and are reported as FAILURE.
inline SweepResult sweep_beta(ExperimentConfig config, const Instance& instance,
                              std::span<const double> betas, const std::string& base) {
    if (betas.empty()) throw std::invalid_argument("sweep_beta: no beta values");
    if (base != "lc" && base != "ms")
        throw std::invalid_argument("sweep_beta: base must be lc or ms, got '" + base + "'");
    const StrategyType type =
        base == "lc" ? StrategyType::InfoDensityLC : StrategyType::InfoDensityMS;
    config.strategies.clear();
    for (double beta : betas) config.strategies.push_back({type, beta});
    SweepResult sweep;
    sweep.base = base;
    sweep.experiment = run_experiment(config, instance);
    for (const StrategyOutcome& outcome : sweep.experiment.outcomes) {
        const CheckpointStat& last = outcome.curve.points.back();
        sweep.rows.push_back({outcome.kind.beta, last.mean, last.stderr_, last.n_failed});
    }
    return sweep;
}

inline void write_results(const ExperimentResult& result, const std::string& out_dir,
                          bool write_events = true) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream combined(out_dir + "/combined_curves.csv");
    if (!combined) throw std::runtime_error("cannot write to '" + out_dir + "'");
    combined << "strategy,budget,mean_accuracy,stderr,n_failed\n";
    std::ofstream run_level(out_dir + "/runs.csv");
    run_level << "strategy,run,seed,assignment_failure,unlabeled_count,budget,accuracy\n";
    for (const StrategyOutcome& outcome : result.outcomes) {
        const std::string display = outcome.kind.name();
        const std::string safe = sanitize_for_filename(display);
        std::ofstream curve(out_dir + "/curve_" + safe + ".csv");
        curve << "budget,mean_accuracy,stderr,n_failed\n";
        for (const CheckpointStat& p : outcome.curve.points) {
            curve << p.budget << ',' << format_g6(p.mean) << ',' << format_g6(p.stderr_) << ','
                  << p.n_failed << "\n";
            combined << display << ',' << p.budget << ',' << format_g6(p.mean) << ','
                     << format_g6(p.stderr_) << ',' << p.n_failed << "\n";
        }
        for (std::size_t r = 0; r < outcome.runs.size(); ++r) {
            const RunResult& run = outcome.runs[r];
            for (const auto& [budget, acc] : run.accuracy_at)
                run_level << display << ',' << (r + 1) << ',' << run.seed << ','
                          << (run.assignment_failure ? 1 : 0) << ',' << run.unlabeled_count << ','
                          << budget << ',' << format_g6(acc) << "\n";
            if (write_events) {
                const std::string dir = out_dir + "/events/" + safe;
                fs::create_directories(dir);
                write_event_log(dir + "/run_" + std::to_string(r + 1) + ".csv", run.seed,
                                run.events);
            }
        }
    }
}

inline void write_sweep(const SweepResult& sweep, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream out(out_dir + "/sweep_" + sweep.base + ".csv");
    if (!out) throw std::runtime_error("cannot write to '" + out_dir + "'");
    out << "beta,final_accuracy,stderr,n_failed\n";
    for (const SweepRow& row : sweep.rows) {
        out << format_g6(row.beta) << ',';
        if (std::isnan(row.final_accuracy))
            out << "FAILURE,nan";
        else
            out << format_g6(row.final_accuracy) << ',' << format_g6(row.stderr_);
        out << ',' << row.n_failed << "\n";
    }
}

// Fig-1-style histogram: worker true-accuracy proportions in 0.05-wide bins
// labeled by their upper edge, aggregated over seeded runs.
struct HistogramBin {
    double upper = 0.0;
    long long count = 0;
    double proportion = 0.0;
};

inline std::vector<HistogramBin> worker_accuracy_histogram(const Instance& instance,
                                                           const ExperimentConfig& config) {
    std::vector<long long> counts(20, 0);
    long long total = 0;
    for (int r = 1; r <= config.runs; ++r) {
        const LabelMatrix labels = run_label_matrix(instance, config.base_seed + r);
        for (double acc : worker_true_accuracy(labels, instance.truth)) {
            int bin = static_cast<int>(std::ceil(acc * 20.0)) - 1; // (0.00,0.05] -> 0
            bin = std::clamp(bin, 0, 19);
            ++counts[bin];
            ++total;
        }
    }
    std::vector<HistogramBin> bins;
    for (int b = 0; b < 20; ++b)
        bins.push_back({(b + 1) * 0.05, counts[b],
                        total > 0 ? static_cast<double>(counts[b]) / total : 0.0});
    return bins;
}

inline void write_histogram(const std::vector<HistogramBin>& bins, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "accuracy_bin_upper,count,proportion\n";
    for (const HistogramBin& bin : bins) {
        char label[16];
        std::snprintf(label, sizeof label, "%.2f", bin.upper);
        out << label << ',' << bin.count << ',' << format_g6(bin.proportion) << "\n";
    }
}

} // namespace crowdbandit
