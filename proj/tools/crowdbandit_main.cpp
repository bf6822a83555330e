#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdbandit/crowdbandit.hpp"

namespace {

using namespace crowdbandit;

struct CliOptions {
    ExperimentConfig config;
    std::string model_name = "spammer-hammer";
    std::string strategies_text = "lc,ms,id-lc:0.05,id-ms:0.05,random";
    std::string out_dir = "out";
    bool no_events = false;
};

void add_common_options(CLI::App& cmd, CliOptions& opt) {
    cmd.add_option("--strategies", opt.strategies_text,
                   "Comma-separated strategies: lc, ms, id-lc:<beta>, id-ms:<beta>, random")
        ->capture_default_str();
    cmd.add_option("--n-prime", opt.config.n_prime, "Exploration tasks per context")
        ->capture_default_str();
    cmd.add_option("--budget-mult", opt.config.budget_mult, "Total budget T in units of N")
        ->capture_default_str();
    cmd.add_option("--checkpoints", opt.config.checkpoints, "Accuracy checkpoints per run")
        ->capture_default_str();
    cmd.add_option("--runs", opt.config.runs, "Seeded repetitions to average over")
        ->capture_default_str();
    cmd.add_option("--seed", opt.config.base_seed, "Base seed; run r uses seed + r")
        ->capture_default_str();
    cmd.add_option("--eta-scale", opt.config.eta_scale, "Learning-rate multiplier")
        ->capture_default_str();
    cmd.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    cmd.add_flag("--no-events", opt.no_events, "Skip per-run event logs");
    cmd.set_config("--config", "", "Read options from a key=value file");
}

void add_simulate_inputs(CLI::App& cmd, CliOptions& opt, bool required) {
    auto* features = cmd.add_option("--features", opt.config.features_path,
                                    "Feature CSV; final column is the true label (-1/+1)");
    if (required) features->required();
    cmd.add_flag("--csv-header", opt.config.csv_has_header, "Skip the first CSV line");
    cmd.add_option("--contexts-k", opt.config.n_contexts, "Number of contexts S for k-means")
        ->capture_default_str();
    cmd.add_option("--workers", opt.config.n_workers, "Number of simulated workers K")
        ->capture_default_str();
    cmd.add_option("--model", opt.model_name,
                   "Worker model: spammer-hammer, one-coin, one-coin-malicious")
        ->capture_default_str();
}

void finalize(CliOptions& opt) {
    opt.config.model = parse_worker_model(opt.model_name);
    opt.config.strategies = parse_strategy_list(opt.strategies_text);
    opt.config.write_events = !opt.no_events;
}

void print_summary(const ExperimentResult& result) {
    for (const StrategyOutcome& outcome : result.outcomes) {
        const CheckpointStat& last = outcome.curve.points.back();
        std::printf("%-12s final accuracy %s +/- %s  (failed runs: %d)\n",
                    outcome.kind.name().c_str(), format_g6(last.mean).c_str(),
                    format_g6(last.stderr_).c_str(), last.n_failed);
    }
}

int run_simulate(CliOptions& opt) {
    finalize(opt);
    const Instance instance = prepare_instance(opt.config);
    std::printf("N=%d tasks, K=%d workers, S=%d contexts, T=%lld\n", instance.contexts.n_tasks(),
                instance.n_workers, instance.contexts.n_contexts(),
                static_cast<long long>(opt.config.budget_mult) * instance.contexts.n_tasks());
    const ExperimentResult result = run_experiment(opt.config, instance);
    write_results(result, opt.out_dir, opt.config.write_events);
    print_summary(result);
    std::printf("results written to %s\n", opt.out_dir.c_str());
    return 0;
}

int run_real(CliOptions& opt) {
    finalize(opt);
    const Instance instance = prepare_instance(opt.config);
    std::printf("N=%d tasks, K=%d workers, S=%d contexts, T=%lld\n", instance.contexts.n_tasks(),
                instance.n_workers, instance.contexts.n_contexts(),
                static_cast<long long>(opt.config.budget_mult) * instance.contexts.n_tasks());
    const ExperimentResult result = run_experiment(opt.config, instance);
    write_results(result, opt.out_dir, opt.config.write_events);
    print_summary(result);
    std::printf("results written to %s\n", opt.out_dir.c_str());
    return 0;
}

int run_sweep(CliOptions& opt, const std::string& base, const std::string& betas_text) {
    finalize(opt);
    std::vector<double> betas;
    std::size_t start = 0;
    while (start <= betas_text.size()) {
        std::size_t comma = betas_text.find(',', start);
        if (comma == std::string::npos) comma = betas_text.size();
        const std::string item = betas_text.substr(start, comma - start);
        if (!item.empty()) betas.push_back(std::stod(item));
        start = comma + 1;
    }
    const Instance instance = prepare_instance(opt.config);
    const SweepResult sweep = sweep_beta(opt.config, instance, betas, base);
    write_results(sweep.experiment, opt.out_dir, opt.config.write_events);
    write_sweep(sweep, opt.out_dir);
    std::printf("%-10s %-14s %-12s %s\n", "beta", "final_accuracy", "stderr", "failed_runs");
    for (const SweepRow& row : sweep.rows) {
        if (std::isnan(row.final_accuracy))
            std::printf("%-10s %-14s %-12s %d\n", format_g6(row.beta).c_str(), "FAILURE", "-",
                        row.n_failed);
        else
            std::printf("%-10s %-14s %-12s %d\n", format_g6(row.beta).c_str(),
                        format_g6(row.final_accuracy).c_str(), format_g6(row.stderr_).c_str(),
                        row.n_failed);
    }
    std::printf("results written to %s\n", opt.out_dir.c_str());
    return 0;
}

int run_histogram(CliOptions& opt, const std::string& out_csv) {
    finalize(opt);
    const Instance instance = prepare_instance(opt.config);
    const auto bins = worker_accuracy_histogram(instance, opt.config);
    write_histogram(bins, out_csv);
    std::printf("histogram written to %s\n", out_csv.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bandit-based task assignment simulator for heterogeneous crowdsourcing"};
    app.require_subcommand(1);

    CliOptions sim_opt;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Cluster a feature CSV into contexts and run simulated workers");
    add_simulate_inputs(*simulate, sim_opt, true);
    add_common_options(*simulate, sim_opt);

    CliOptions real_opt;
    CLI::App* real = app.add_subcommand("run", "Run on a complete label matrix (real data)");
    real->add_option("--labels", real_opt.config.labels_path, "Complete N x K label matrix CSV")
        ->required();
    real->add_option("--truth", real_opt.config.truth_path, "True labels, one per line")
        ->required();
    real->add_option("--context", real_opt.config.context_path,
                     "Context per task, one per line (default: one context)");
    add_common_options(*real, real_opt);

    CliOptions sweep_opt;
    std::string sweep_base = "lc";
    std::string betas_text = "0.001,0.005,0.01,0.05,0.1,0.5,1,2";
    CLI::App* sweep = app.add_subcommand("sweep-beta", "Final accuracy of ID(base, beta) per beta");
    sweep->add_option("--base", sweep_base, "Confidence score for ID: lc or ms")
        ->capture_default_str();
    sweep->add_option("--betas", betas_text, "Comma-separated beta values")->capture_default_str();
    add_simulate_inputs(*sweep, sweep_opt, true);
    add_common_options(*sweep, sweep_opt);

    CliOptions hist_opt;
    std::string hist_out = "worker_histogram.csv";
    CLI::App* histogram = app.add_subcommand(
        "worker-histogram", "True-accuracy histogram of simulated workers (0.05-wide bins)");
    add_simulate_inputs(*histogram, hist_opt, true);
    histogram->add_option("--runs", hist_opt.config.runs, "Worker populations to aggregate")
        ->capture_default_str();
    histogram->add_option("--seed", hist_opt.config.base_seed, "Base seed")->capture_default_str();
    histogram->add_option("--out", hist_out, "Output CSV path")->capture_default_str();
    histogram->set_config("--config", "", "Read options from a key=value file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(sim_opt);
        if (real->parsed()) return run_real(real_opt);
        if (sweep->parsed()) return run_sweep(sweep_opt, sweep_base, betas_text);
        if (histogram->parsed()) return run_histogram(hist_opt, hist_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
