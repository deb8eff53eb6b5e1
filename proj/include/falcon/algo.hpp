#pragma once

// Epoch-based inverse-gap-weighting learners and baselines.
//
// Both main learners refit a predictor at epoch boundaries and then play the
// randomized action kernel
//     p(a | x) = 1 / (K + gamma_m * (fhat(x, ahat) - fhat(x, a)))   a != ahat,
//     p(ahat | x) = 1 - sum of the others,
// where ahat is the greedy action under the current predictor and gamma_m is
// the epoch's learning rate. They differ in the learning-rate formula and in
// which slice of the history the oracle sees:
//   - FalconBandit: gamma from class cardinality, oracle refit on all rounds;
//   - FalconPlusBandit: gamma from an estimation-error curve, oracle refit on
//     the previous epoch's rounds only (requires tau_m >= 2^m growth).

#include <cstdint>
#include <memory>
#include <random>

#include "falcon/core.hpp"
#include "falcon/oracle.hpp"
#include "falcon/schedule.hpp"

namespace falcon {

// Distribution over actions for one round, plus the greedy action it favors.
struct ActionDistribution {
    std::vector<double> probs;
    int greedy = 0;
};

// The inverse-gap-weighting kernel for predictor `f` at learning rate `gamma`.
// gamma = 0 degenerates to the uniform distribution.
ActionDistribution action_distribution(const Predictor& f, double gamma, const Context& x,
                                       int num_actions);

// Epsilon-greedy mixture: greedy action gets 1 - eps + eps/K, others eps/K.
ActionDistribution epsilon_greedy_distribution(const Predictor& f, double epsilon,
                                               const Context& x, int num_actions);

// Learning rate for the finite-class learner entering epoch m with
// tau_{m-1} = `tau_prev` completed rounds:
//     (1/30) * sqrt(K * tau_prev / ln(|F| * tau_prev / delta)).
// Returns the raw formula value; the learner state keeps gamma >= 1 and
// nondecreasing via a running max (see FalconBandit).
double falcon_learning_rate(int num_actions, long tau_prev, long class_size, double delta);

// Learning rate for the curve-driven learner entering epoch m:
//     max((1/2) * sqrt(K / xi(tau_prev - tau_prev2, delta / (2 * tau_prev))),
//         prev_gamma).
double falcon_plus_learning_rate(int num_actions, const EstimationErrorCurve& xi, long tau_prev,
                                 long tau_prev2, double delta, double prev_gamma);

struct StepOutcome {
    int action = 0;
    ActionDistribution dist;
};

// Common learner interface driven by the simulation loop. The loop calls
// begin_epoch(m, ...) as round tau_{m-1} + 1 starts, with the history holding
// exactly rounds 1..tau_{m-1}; then step() once per round.
class BanditAlgorithm {
public:
    virtual ~BanditAlgorithm() = default;

    virtual void begin_epoch(int epoch, const InteractionLog& history,
                             const EpochSchedule& schedule) = 0;
    // Consumes exactly one uniform draw from `gen` to pick the action.
    virtual StepOutcome step(const Context& x, std::mt19937_64& gen) = 0;

    // Current learning rate; 0 for baselines that have none.
    virtual double gamma() const = 0;
    virtual const Predictor& predictor() const = 0;
    long oracle_calls() const { return oracle_calls_; }
    // Number of records fed to the most recent oracle fit.
    long last_fit_size() const { return last_fit_size_; }
    // Total [0,1]-clamp events across all predictors fit so far.
    std::uint64_t clamp_events() const;
    int num_actions() const { return num_actions_; }

protected:
    BanditAlgorithm(int num_actions) : num_actions_(num_actions) {}
    void record_fit(std::shared_ptr<const Predictor> p, bool counts_as_call, long n_records);
    const Predictor& fitted() const;

    int num_actions_;
    long oracle_calls_ = 0;
    long last_fit_size_ = 0;
    std::vector<std::shared_ptr<const Predictor>> fits_;  // one per epoch
};

class FalconBandit final : public BanditAlgorithm {
public:
    // delta in (0, 1); the class supplies both the oracle and |F|.
    FalconBandit(FiniteFunctionClass cls, double delta);

    void begin_epoch(int epoch, const InteractionLog& history,
                     const EpochSchedule& schedule) override;
    StepOutcome step(const Context& x, std::mt19937_64& gen) override;
    double gamma() const override { return gamma_; }
    const Predictor& predictor() const override { return fitted(); }

private:
    FiniteClassErmOracle oracle_;
    double delta_;
    double gamma_ = 1.0;
};

class FalconPlusBandit final : public BanditAlgorithm {
public:
    FalconPlusBandit(std::shared_ptr<const RegressionOracle> oracle, EstimationErrorCurve xi,
                     int num_actions, double delta);

    void begin_epoch(int epoch, const InteractionLog& history,
                     const EpochSchedule& schedule) override;
    StepOutcome step(const Context& x, std::mt19937_64& gen) override;
    double gamma() const override { return gamma_; }
    const Predictor& predictor() const override { return fitted(); }

private:
    std::shared_ptr<const RegressionOracle> oracle_;
    EstimationErrorCurve xi_;
    double delta_;
    double gamma_ = 1.0;
};

// Epsilon-greedy over the same oracle/schedule machinery, so comparisons with
// the main learners isolate the action-selection rule. epsilon = 1 is the
// uniform-random baseline.
class EpsilonGreedyBandit final : public BanditAlgorithm {
public:
    EpsilonGreedyBandit(std::shared_ptr<const RegressionOracle> oracle, int num_actions,
                        double epsilon);

    void begin_epoch(int epoch, const InteractionLog& history,
                     const EpochSchedule& schedule) override;
    StepOutcome step(const Context& x, std::mt19937_64& gen) override;
    double gamma() const override { return 0.0; }
    const Predictor& predictor() const override { return fitted(); }
    double epsilon() const { return epsilon_; }

private:
    std::shared_ptr<const RegressionOracle> oracle_;
    double epsilon_;
};

}  // namespace falcon
