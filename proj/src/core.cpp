#include "falcon/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace falcon {

int argmax_lowest_index(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax over empty value list");
    int best = 0;
    for (int i = 1; i < static_cast<int>(values.size()); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

TablePredictor::TablePredictor(int num_contexts, int num_actions, std::vector<double> values,
                               int member_id)
    : num_contexts_(num_contexts),
      num_actions_(num_actions),
      values_(std::move(values)),
      member_id_(member_id) {
    if (num_contexts_ <= 0 || num_actions_ <= 0)
        throw std::invalid_argument("TablePredictor: dimensions must be positive");
    if (values_.size() != static_cast<std::size_t>(num_contexts_) * num_actions_)
        throw std::invalid_argument("TablePredictor: value table has wrong size");
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("TablePredictor: values must lie in [0, 1]");
    }
}

double TablePredictor::eval(const Context& x, int action) const {
    return at(x.index, action);
}

double TablePredictor::at(int context, int action) const {
    if (context < 0 || context >= num_contexts_)
        throw std::out_of_range("TablePredictor: context index " + std::to_string(context) +
                                " out of range");
    if (action < 0 || action >= num_actions_)
        throw std::out_of_range("TablePredictor: action index out of range");
    return values_[static_cast<std::size_t>(context) * num_actions_ + action];
}

LinearPredictor::LinearPredictor(std::vector<double> theta) : theta_(std::move(theta)) {
    if (theta_.empty()) throw std::invalid_argument("LinearPredictor: empty parameter vector");
}

double LinearPredictor::eval(const Context& x, int action) const {
    if (action < 0 || action >= static_cast<int>(x.action_features.size()))
        throw std::out_of_range("LinearPredictor: context carries no features for action");
    const auto& phi = x.action_features[static_cast<std::size_t>(action)];
    if (phi.size() != theta_.size())
        throw std::invalid_argument("LinearPredictor: feature dimension mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < theta_.size(); ++i) v += theta_[i] * phi[i];
    if (v < 0.0 || v > 1.0) {
        ++clamp_events_;
        v = std::clamp(v, 0.0, 1.0);
    }
    return v;
}

FiniteFunctionClass::FiniteFunctionClass(int num_contexts, int num_actions,
                                         std::vector<std::vector<double>> member_tables)
    : num_contexts_(num_contexts), num_actions_(num_actions), tables_(std::move(member_tables)) {
    if (num_contexts_ <= 0 || num_actions_ <= 0)
        throw std::invalid_argument("FiniteFunctionClass: dimensions must be positive");
    if (tables_.size() < 4)
        throw std::invalid_argument("FiniteFunctionClass: needs at least 4 members");
    const std::size_t cells = static_cast<std::size_t>(num_contexts_) * num_actions_;
    for (const auto& t : tables_) {
        if (t.size() != cells)
            throw std::invalid_argument("FiniteFunctionClass: member table has wrong size");
        for (double v : t) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("FiniteFunctionClass: entries must lie in [0, 1]");
        }
    }
}

double FiniteFunctionClass::value(int member, int context, int action) const {
    return table(member)[static_cast<std::size_t>(context) * num_actions_ + action];
}

const std::vector<double>& FiniteFunctionClass::table(int member) const {
    if (member < 0 || member >= size())
        throw std::out_of_range("FiniteFunctionClass: member index out of range");
    return tables_[static_cast<std::size_t>(member)];
}

std::shared_ptr<const TablePredictor> FiniteFunctionClass::member(int index) const {
    return std::make_shared<TablePredictor>(num_contexts_, num_actions_, table(index), index);
}

void InteractionLog::append(Context context, int action, double reward) {
    if (!(reward >= 0.0 && reward <= 1.0))
        throw std::invalid_argument("InteractionLog: reward must lie in [0, 1]");
    InteractionRecord rec;
    rec.round = size() + 1;
    rec.context = std::move(context);
    rec.action = action;
    rec.reward = reward;
    records_.push_back(std::move(rec));
}

std::span<const InteractionRecord> InteractionLog::range(long first_round,
                                                         long last_round) const {
    if (first_round < 1 || last_round > size() || first_round > last_round + 1)
        throw std::out_of_range("InteractionLog: round range out of bounds");
    if (first_round > last_round) return {};
    return std::span<const InteractionRecord>(records_).subspan(
        static_cast<std::size_t>(first_round - 1),
        static_cast<std::size_t>(last_round - first_round + 1));
}

Policy induced_policy(const Predictor& f, int num_contexts, int num_actions) {
    if (num_contexts <= 0 || num_actions <= 0)
        throw std::invalid_argument("induced_policy: dimensions must be positive");
    Policy pi;
    pi.actions.resize(static_cast<std::size_t>(num_contexts));
    std::vector<double> vals(static_cast<std::size_t>(num_actions));
    for (int x = 0; x < num_contexts; ++x) {
        Context ctx;
        ctx.index = x;
        for (int a = 0; a < num_actions; ++a) vals[static_cast<std::size_t>(a)] = f.eval(ctx, a);
        pi.actions[static_cast<std::size_t>(x)] = argmax_lowest_index(vals);
    }
    return pi;
}

double policy_reward(const Policy& policy, const Predictor& f_star,
                     std::span<const double> context_dist) {
    if (policy.num_contexts() != static_cast<int>(context_dist.size()))
        throw std::invalid_argument("policy_reward: policy/context distribution size mismatch");
    double total = 0.0;
    for (double p : context_dist) {
        if (!(p >= 0.0)) throw std::invalid_argument("policy_reward: negative context probability");
        total += p;
    }
    if (std::abs(total - 1.0) > kEqualityTol)
        throw std::invalid_argument("policy_reward: context distribution must sum to 1");
    double value = 0.0;
    for (int x = 0; x < policy.num_contexts(); ++x) {
        Context ctx;
        ctx.index = x;
        value += context_dist[static_cast<std::size_t>(x)] * f_star.eval(ctx, policy(x));
    }
    return value;
}

}  // namespace falcon
