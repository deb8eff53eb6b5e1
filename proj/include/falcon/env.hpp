#pragma once

// Synthetic realizable environments.
//
// Each round the environment draws a context and a full vector of Bernoulli
// rewards whose means are given exactly by a hidden true regression function
// f_star (realizability). The learner is shown only the context and, after
// acting, the reward of its chosen action; the full sample (means + reward
// vector) is visible to the simulation's accountant alone.

#include <memory>
#include <random>
#include <vector>

#include "falcon/core.hpp"

namespace falcon {

// Everything the world generates in one round. `context` is learner-visible;
// `means` and the unchosen coordinates of `rewards` are accountant-only.
struct RoundSample {
    Context context;
    std::vector<double> means;
    std::vector<double> rewards;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual int num_actions() const = 0;
    virtual RoundSample sample_round(std::mt19937_64& gen) const = 0;
};

// Finite context space with an explicit distribution, rewards Bernoulli
// around a designated member f_star of an explicit finite class.
class FiniteRealizableEnv final : public Environment {
public:
    FiniteRealizableEnv(std::vector<double> context_dist, FiniteFunctionClass cls,
                        int star_index);

    int num_actions() const override { return class_.num_actions(); }
    int num_contexts() const { return class_.num_contexts(); }
    RoundSample sample_round(std::mt19937_64& gen) const override;

    // Accountant/verification accessors; never handed to learners.
    const std::vector<double>& context_dist() const { return context_dist_; }
    const FiniteFunctionClass& function_class() const { return class_; }
    int star_index() const { return star_; }
    const TablePredictor& f_star() const { return *f_star_; }

private:
    std::vector<double> context_dist_;
    FiniteFunctionClass class_;
    int star_;
    std::shared_ptr<const TablePredictor> f_star_;
};

// Linear realizable environment: each round every action gets a feature
// vector x_a with ||x_a||_2 <= 1 constructed so that theta_star . x_a equals
// a target mean in [0, 1]; rewards are Bernoulli at those means. One action
// per round (chosen uniformly) receives a mean from the `hot` range, the
// rest from the `cold` range, so contexts always contain a clearly best arm.
struct LinearEnvParams {
    int dimension = 5;
    int num_actions = 4;
    std::vector<double> theta;  // empty -> (1/sqrt(d), ..., 1/sqrt(d)); else ||theta||_2 in (0, 1]
    double hot_mean_lo = 0.85;
    double hot_mean_hi = 0.95;
    double cold_mean_lo = 0.05;
    double cold_mean_hi = 0.15;
};

class LinearRealizableEnv final : public Environment {
public:
    explicit LinearRealizableEnv(LinearEnvParams params);

    int num_actions() const override { return params_.num_actions; }
    int dimension() const { return params_.dimension; }
    RoundSample sample_round(std::mt19937_64& gen) const override;

    const std::vector<double>& theta_star() const { return params_.theta; }
    const LinearEnvParams& params() const { return params_; }

private:
    LinearEnvParams params_;
    double theta_norm_;
};

// Randomly generated finite instance with a planted optimum:
//   - uniform context distribution over `num_contexts` contexts;
//   - f_star gives every context a unique best action beating the runner-up
//     by at least `gap` (gap in (0, 0.5]);
//   - the other class members disagree with f_star on at least 25% of cells,
//     and f_star's position in the class is drawn uniformly, so greedy play
//     against the initial (index-0) fit is unreliable and exploration pays.
FiniteRealizableEnv make_planted_instance(int num_contexts, int num_actions, int class_size,
                                          double gap, std::mt19937_64& gen);

}  // namespace falcon
