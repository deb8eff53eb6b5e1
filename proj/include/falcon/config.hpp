#pragma once

// Experiment descriptors, the plain-text config format, and factories that
// turn a descriptor into live environment / schedule / learner objects.
//
// Config grammar (see README for the full reference):
//   - `[section]` headers, `key = value` pairs, `#` or `;` comments;
//   - lists are whitespace-separated numbers;
//   - unknown sections or keys are errors (they name the offending field).
// serialize_config() emits a canonical echo whose re-parse reproduces the
// experiment exactly, which is how runs are made replayable.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "falcon/algo.hpp"
#include "falcon/env.hpp"
#include "falcon/schedule.hpp"

namespace falcon {

// Configuration problem tied to a specific field, e.g. "run.horizon".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ScheduleSpec {
    std::string kind = "geometric";  // geometric | known-horizon | custom
    std::vector<long> boundaries;    // custom only
};

struct EnvSpec {
    std::string type = "finite";  // finite | linear

    // finite: planted-instance generator parameters
    int contexts = 20;
    int actions = 5;
    int class_size = 50;
    double gap = 0.2;

    // linear
    int dimension = 5;
    std::vector<double> theta;  // empty -> uniform unit direction
    double hot_mean_lo = 0.85;
    double hot_mean_hi = 0.95;
    double cold_mean_lo = 0.05;
    double cold_mean_hi = 0.15;
};

struct OracleSpec {
    std::string xi = "auto";  // auto | finite | linear | constant
    double xi_c = 0.0;        // 0 -> curve default (16 finite, 8 linear)
    double xi_value = 1.0;    // constant curve only
    double ridge = 1e-8;
};

struct Experiment {
    std::string algorithm = "falcon";  // falcon | falcon-plus | epsilon-greedy | uniform
    long horizon = 10000;
    std::uint64_t seed = 1;
    std::uint64_t instance_seed = 0;  // 0 -> derived from the run seed
    double delta = 0.05;
    double epsilon = 0.1;  // epsilon-greedy only
    long log_every = 1;

    ScheduleSpec schedule;
    EnvSpec env;
    OracleSpec oracle;
};

// Parse / echo the plain-text format. parse_config throws ConfigError with
// the offending "section.key" on malformed input.
Experiment parse_config(const std::string& text);
Experiment load_config_file(const std::string& path);
std::string serialize_config(const Experiment& e);

// Full semantic validation; throws ConfigError naming the offending field.
void validate(const Experiment& e);

// RNG sub-stream indices for a run seed (see rng.hpp).
inline constexpr std::uint64_t kEnvStream = 0;
inline constexpr std::uint64_t kAlgoStream = 1;
inline constexpr std::uint64_t kInstanceStream = 2;

// Instance seed actually used by a run: the explicit one, or a stream derived
// from the run seed when instance_seed == 0.
std::uint64_t effective_instance_seed(const Experiment& e, std::uint64_t run_seed);

// Factories (validate() is called first in each).
std::unique_ptr<Environment> make_environment(const Experiment& e, std::uint64_t run_seed);
EpochSchedule make_schedule(const Experiment& e);
std::unique_ptr<BanditAlgorithm> make_algorithm(const Experiment& e, const Environment& env);

// Estimation-error curve selected by the experiment for the given
// environment (falcon-plus only).
EstimationErrorCurve make_xi_curve(const Experiment& e, const Environment& env);

}  // namespace falcon
