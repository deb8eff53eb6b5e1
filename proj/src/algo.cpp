#include "falcon/algo.hpp"

#include <cmath>
#include <stdexcept>

#include "falcon/rng.hpp"

namespace falcon {

ActionDistribution action_distribution(const Predictor& f, double gamma, const Context& x,
                                       int num_actions) {
    if (num_actions < 2) throw std::invalid_argument("action_distribution: need >= 2 actions");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("action_distribution: gamma must be finite and >= 0");
    std::vector<double> vals(static_cast<std::size_t>(num_actions));
    for (int a = 0; a < num_actions; ++a) vals[static_cast<std::size_t>(a)] = f.eval(x, a);
    ActionDistribution dist;
    dist.greedy = argmax_lowest_index(vals);
    dist.probs.resize(static_cast<std::size_t>(num_actions));
    const double best = vals[static_cast<std::size_t>(dist.greedy)];
    double rest = 0.0;
    for (int a = 0; a < num_actions; ++a) {
        if (a == dist.greedy) continue;
        const double p =
            1.0 / (static_cast<double>(num_actions) + gamma * (best - vals[static_cast<std::size_t>(a)]));
        dist.probs[static_cast<std::size_t>(a)] = p;
        rest += p;
    }
    dist.probs[static_cast<std::size_t>(dist.greedy)] = 1.0 - rest;
    return dist;
}

ActionDistribution epsilon_greedy_distribution(const Predictor& f, double epsilon,
                                               const Context& x, int num_actions) {
    if (num_actions < 2)
        throw std::invalid_argument("epsilon_greedy_distribution: need >= 2 actions");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon_greedy_distribution: epsilon must lie in [0, 1]");
    std::vector<double> vals(static_cast<std::size_t>(num_actions));
    for (int a = 0; a < num_actions; ++a) vals[static_cast<std::size_t>(a)] = f.eval(x, a);
    ActionDistribution dist;
    dist.greedy = argmax_lowest_index(vals);
    const double explore = epsilon / static_cast<double>(num_actions);
    dist.probs.assign(static_cast<std::size_t>(num_actions), explore);
    dist.probs[static_cast<std::size_t>(dist.greedy)] = 1.0 - epsilon + explore;
    return dist;
}

double falcon_learning_rate(int num_actions, long tau_prev, long class_size, double delta) {
    if (num_actions < 2) throw std::invalid_argument("falcon_learning_rate: need >= 2 actions");
    if (tau_prev < 1) throw std::invalid_argument("falcon_learning_rate: tau_prev must be >= 1");
    if (class_size < 1) throw std::invalid_argument("falcon_learning_rate: class size >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("falcon_learning_rate: delta must lie in (0, 1)");
    const double logterm =
        std::log(static_cast<double>(class_size) * static_cast<double>(tau_prev) / delta);
    return (1.0 / 30.0) *
           std::sqrt(static_cast<double>(num_actions) * static_cast<double>(tau_prev) / logterm);
}

double falcon_plus_learning_rate(int num_actions, const EstimationErrorCurve& xi, long tau_prev,
                                 long tau_prev2, double delta, double prev_gamma) {
    if (num_actions < 2)
        throw std::invalid_argument("falcon_plus_learning_rate: need >= 2 actions");
    if (tau_prev2 < 0 || tau_prev <= tau_prev2)
        throw std::invalid_argument("falcon_plus_learning_rate: need tau_prev > tau_prev2 >= 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("falcon_plus_learning_rate: delta must lie in (0, 1)");
    const long n = tau_prev - tau_prev2;
    const double shrunk_delta = delta / (2.0 * static_cast<double>(tau_prev));
    const double err = xi(n, shrunk_delta);
    const double raw = 0.5 * std::sqrt(static_cast<double>(num_actions) / err);
    return std::max(raw, prev_gamma);
}

void BanditAlgorithm::record_fit(std::shared_ptr<const Predictor> p, bool counts_as_call,
                                 long n_records) {
    if (!p) throw std::logic_error("oracle returned a null predictor");
    fits_.push_back(std::move(p));
    last_fit_size_ = n_records;
    if (counts_as_call) ++oracle_calls_;
}

const Predictor& BanditAlgorithm::fitted() const {
    if (fits_.empty()) throw std::logic_error("learner queried before its first epoch began");
    return *fits_.back();
}

std::uint64_t BanditAlgorithm::clamp_events() const {
    std::uint64_t total = 0;
    for (const auto& p : fits_) {
        if (auto* lin = dynamic_cast<const LinearPredictor*>(p.get()))
            total += lin->clamp_events();
    }
    return total;
}

namespace {

StepOutcome kernel_step(const Predictor& f, double gamma, const Context& x, int num_actions,
                        std::mt19937_64& gen) {
    StepOutcome out;
    out.dist = action_distribution(f, gamma, x, num_actions);
    out.action = sample_index(out.dist.probs, uniform01(gen));
    return out;
}

}  // namespace

FalconBandit::FalconBandit(FiniteFunctionClass cls, double delta)
    : BanditAlgorithm(cls.num_actions()), oracle_(std::move(cls)), delta_(delta) {
    if (!(delta_ > 0.0 && delta_ < 1.0))
        throw std::invalid_argument("FalconBandit: delta must lie in (0, 1)");
}

void FalconBandit::begin_epoch(int epoch, const InteractionLog& history,
                               const EpochSchedule& schedule) {
    if (epoch < 1) throw std::invalid_argument("begin_epoch: epochs are 1-based");
    if (epoch == 1) {
        // No data yet: learning rate 1 and the oracle's empty-data output.
        gamma_ = 1.0;
        record_fit(oracle_.fit({}), /*counts_as_call=*/false, 0);
        return;
    }
    const long tau_prev = schedule.boundary(epoch - 1);
    if (history.size() != tau_prev)
        throw std::logic_error("begin_epoch: history does not end at the epoch boundary");
    const double raw = falcon_learning_rate(num_actions_, tau_prev,
                                            oracle_.function_class().size(), delta_);
    // Running max keeps gamma >= 1 and nondecreasing across epochs.
    gamma_ = std::max(gamma_, raw);
    record_fit(oracle_.fit(history.range(1, tau_prev)), /*counts_as_call=*/true,
               tau_prev);
}

StepOutcome FalconBandit::step(const Context& x, std::mt19937_64& gen) {
    return kernel_step(fitted(), gamma_, x, num_actions_, gen);
}

FalconPlusBandit::FalconPlusBandit(std::shared_ptr<const RegressionOracle> oracle,
                                   EstimationErrorCurve xi, int num_actions, double delta)
    : BanditAlgorithm(num_actions), oracle_(std::move(oracle)), xi_(std::move(xi)), delta_(delta) {
    if (!oracle_) throw std::invalid_argument("FalconPlusBandit: oracle required");
    if (num_actions < 2) throw std::invalid_argument("FalconPlusBandit: need >= 2 actions");
    if (!(delta_ > 0.0 && delta_ < 1.0))
        throw std::invalid_argument("FalconPlusBandit: delta must lie in (0, 1)");
}

void FalconPlusBandit::begin_epoch(int epoch, const InteractionLog& history,
                                   const EpochSchedule& schedule) {
    if (epoch < 1) throw std::invalid_argument("begin_epoch: epochs are 1-based");
    if (epoch == 1) {
        gamma_ = 1.0;
        record_fit(oracle_->fit({}), /*counts_as_call=*/false, 0);
        return;
    }
    const long tau_prev = schedule.boundary(epoch - 1);
    const long tau_prev2 = schedule.boundary(epoch - 2);
    if (history.size() != tau_prev)
        throw std::logic_error("begin_epoch: history does not end at the epoch boundary");
    gamma_ = falcon_plus_learning_rate(num_actions_, xi_, tau_prev, tau_prev2, delta_, gamma_);
    // Only the rounds of the immediately preceding epoch feed the oracle.
    record_fit(oracle_->fit(history.range(tau_prev2 + 1, tau_prev)), /*counts_as_call=*/true,
               tau_prev - tau_prev2);
}

StepOutcome FalconPlusBandit::step(const Context& x, std::mt19937_64& gen) {
    return kernel_step(fitted(), gamma_, x, num_actions_, gen);
}

EpsilonGreedyBandit::EpsilonGreedyBandit(std::shared_ptr<const RegressionOracle> oracle,
                                         int num_actions, double epsilon)
    : BanditAlgorithm(num_actions), oracle_(std::move(oracle)), epsilon_(epsilon) {
    if (!oracle_) throw std::invalid_argument("EpsilonGreedyBandit: oracle required");
    if (num_actions < 2) throw std::invalid_argument("EpsilonGreedyBandit: need >= 2 actions");
    if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0))
        throw std::invalid_argument("EpsilonGreedyBandit: epsilon must lie in [0, 1]");
}

void EpsilonGreedyBandit::begin_epoch(int epoch, const InteractionLog& history,
                                      const EpochSchedule& schedule) {
    if (epoch < 1) throw std::invalid_argument("begin_epoch: epochs are 1-based");
    if (epoch == 1) {
        record_fit(oracle_->fit({}), /*counts_as_call=*/false, 0);
        return;
    }
    const long tau_prev = schedule.boundary(epoch - 1);
    if (history.size() != tau_prev)
        throw std::logic_error("begin_epoch: history does not end at the epoch boundary");
    record_fit(oracle_->fit(history.range(1, tau_prev)), /*counts_as_call=*/true, tau_prev);
}

StepOutcome EpsilonGreedyBandit::step(const Context& x, std::mt19937_64& gen) {
    StepOutcome out;
    out.dist = epsilon_greedy_distribution(fitted(), epsilon_, x, num_actions_);
    out.action = sample_index(out.dist.probs, uniform01(gen));
    return out;
}

}  // namespace falcon
