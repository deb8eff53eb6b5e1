#pragma once

// Deterministic simulation runner and multi-seed replication.
//
// A run owns two generator streams derived from its seed (environment draws
// and action sampling), advances epochs per the schedule, and accounts regret
// against the optimal action of the hidden truth each round:
//   inst_regret  = r_t(best action) - r_t(chosen)      (realized rewards)
//   pseudo_regret = mean(best action) - mean(chosen)   (hidden means)
// Rerunning the same experiment and seed reproduces the byte-identical CSV.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "falcon/config.hpp"

namespace falcon {

struct RoundRecord {
    long round = 0;
    int epoch = 0;
    double gamma = 0.0;
    int context = -1;  // finite context index; -1 for feature-based contexts
    int action = 0;
    double reward = 0.0;
    double inst_regret = 0.0;
    double cum_regret = 0.0;
    long oracle_calls = 0;
    double pseudo_regret = 0.0;      // secondary, lower-variance series
    double cum_pseudo_regret = 0.0;  // (kept out of the CSV; see to_csv)
};

struct RunResult {
    Experiment config;        // effective config (seed included)
    std::uint64_t seed = 0;
    long horizon = 0;
    int epochs_entered = 0;
    long oracle_calls = 0;
    std::uint64_t clamp_events = 0;
    double final_cum_regret = 0.0;
    double final_cum_pseudo_regret = 0.0;
    double wall_seconds = 0.0;
    // Every log_every-th round plus always the final round.
    std::vector<RoundRecord> records;
};

// Run the experiment with its configured seed, or with an explicit override.
RunResult run(const Experiment& e);
RunResult run(const Experiment& e, std::uint64_t seed);

// Drive an explicit environment/schedule/learner triple directly (no config).
// run() delegates here after building its pieces; tests use it for worlds the
// config grammar cannot express. The result's config echo is left empty.
RunResult run_rounds(const Environment& env, const EpochSchedule& schedule,
                     BanditAlgorithm& algo, long horizon, long log_every, std::uint64_t seed);

// CSV with header exactly:
//   round,epoch,gamma,context,action,reward,inst_regret,cum_regret,oracle_calls
std::string to_csv(const RunResult& r);
void write_csv(const RunResult& r, const std::string& path);

struct ReplicateSummary {
    Experiment config;
    std::vector<std::uint64_t> seeds;
    std::vector<double> final_regrets;  // aligned with seeds
    double mean = 0.0;
    double p10 = 0.0;
    double p90 = 0.0;
    double theoretical_bound = 0.0;
};

// Fan runs out across hardware threads; results are keyed by seed, so the
// summary is independent of completion order. threads <= 0 picks the
// hardware concurrency.
ReplicateSummary replicate(const Experiment& e, std::span<const std::uint64_t> seeds,
                           int threads = 0);

std::string summary_json(const ReplicateSummary& s);

// High-probability regret bound at horizon T for the experiment's learner.
// Finite-class runs use
//   608.5 * sqrt(K T ln(|F| T / delta)) + sqrt(8 T ln(2 / delta)) + tau_1;
// curve-driven runs use the epoch-sum analogue
//   14.3 sqrt(K) * sum_m sqrt(xi_{delta/(2T)}(tau_{m-1}-tau_{m-2})) (tau_m - tau_{m-1})
//     + sqrt(8 T ln(2 / delta)) + tau_1.
double regret_bound(const Experiment& e, long horizon);

// The finite-class closed form, directly.
double finite_class_regret_bound(int num_actions, long horizon, long class_size, double delta,
                                 long tau1);

// Nearest-rank quantile of `values` (q in [0, 1]): sorted value at index
// ceil(q * n) - 1, clamped to the ends.
double quantile_nearest_rank(std::vector<double> values, double q);

}  // namespace falcon
