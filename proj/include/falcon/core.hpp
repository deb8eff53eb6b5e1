#pragma once

// Core domain types: contexts, predictors, finite function classes,
// interaction logs, and policies, plus the two fundamental operations
// induced_policy (greedy argmax) and policy_reward (expected reward under
// the context distribution).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace falcon {

inline constexpr double kEqualityTol = 1e-12;

// A context as presented to predictors. Finite-space contexts carry an index
// into {0, ..., |X|-1}; linear-model contexts carry one feature vector per
// action (each of dimension d). Either field may be unused.
struct Context {
    int index = -1;
    std::vector<std::vector<double>> action_features;  // [action][feature]
};

// A regression function f: (context, action) -> predicted expected reward.
class Predictor {
public:
    virtual ~Predictor() = default;
    // Predicted expected reward, always in [0, 1].
    virtual double eval(const Context& x, int action) const = 0;
    // Index within a finite class, or -1 when the predictor is not a class member.
    virtual int id() const { return -1; }
};

// Predictor backed by an |X| x K table of values in [0, 1].
class TablePredictor final : public Predictor {
public:
    TablePredictor(int num_contexts, int num_actions, std::vector<double> values,
                   int member_id = -1);

    double eval(const Context& x, int action) const override;
    int id() const override { return member_id_; }
    int num_contexts() const { return num_contexts_; }
    int num_actions() const { return num_actions_; }
    double at(int context, int action) const;
    const std::vector<double>& values() const { return values_; }

private:
    int num_contexts_;
    int num_actions_;
    std::vector<double> values_;  // row-major [context][action]
    int member_id_;
};

// Predictor f(x, a) = clamp(theta . phi(x, a), 0, 1) where phi(x, a) is the
// context's feature vector for action a. Clamp events are counted so runs can
// surface how often raw predictions left [0, 1].
class LinearPredictor final : public Predictor {
public:
    explicit LinearPredictor(std::vector<double> theta);

    double eval(const Context& x, int action) const override;
    const std::vector<double>& theta() const { return theta_; }
    int dimension() const { return static_cast<int>(theta_.size()); }
    std::uint64_t clamp_events() const { return clamp_events_; }

private:
    std::vector<double> theta_;
    mutable std::uint64_t clamp_events_ = 0;
};

// An explicit finite class F = {f_0, ..., f_{|F|-1}} of table predictors over
// a shared finite context space. Requires |F| >= 4 and all entries in [0, 1].
class FiniteFunctionClass {
public:
    FiniteFunctionClass(int num_contexts, int num_actions,
                        std::vector<std::vector<double>> member_tables);

    int size() const { return static_cast<int>(tables_.size()); }
    int num_contexts() const { return num_contexts_; }
    int num_actions() const { return num_actions_; }
    // Value f_i(x, a).
    double value(int member, int context, int action) const;
    const std::vector<double>& table(int member) const;
    // Member as a shareable predictor carrying its class index.
    std::shared_ptr<const TablePredictor> member(int index) const;

private:
    int num_contexts_;
    int num_actions_;
    std::vector<std::vector<double>> tables_;  // tables_[i] row-major |X| x K
};

// One observed interaction: the context shown, the action taken, the reward
// seen for that action only.
struct InteractionRecord {
    long round = 0;  // 1-based
    Context context;
    int action = 0;
    double reward = 0.0;
};

// Append-only log of interactions with contiguous 1-based rounds.
class InteractionLog {
public:
    void append(Context context, int action, double reward);
    long size() const { return static_cast<long>(records_.size()); }
    bool empty() const { return records_.empty(); }
    std::span<const InteractionRecord> all() const { return records_; }
    // Records for rounds first..last inclusive (1-based).
    std::span<const InteractionRecord> range(long first_round, long last_round) const;

private:
    std::vector<InteractionRecord> records_;
};

// Deterministic mapping from finite contexts to actions, stored densely.
struct Policy {
    std::vector<int> actions;  // actions[x] for x in {0, ..., |X|-1}
    int operator()(int context) const { return actions.at(static_cast<std::size_t>(context)); }
    int num_contexts() const { return static_cast<int>(actions.size()); }
};

// Greedy policy induced by a predictor over a finite context space:
// pi_f(x) = argmax_a f(x, a), ties broken toward the lowest action index.
Policy induced_policy(const Predictor& f, int num_contexts, int num_actions);

// Expected reward of `policy` under true means `f_star` and context
// distribution `context_dist` (must sum to 1 within 1e-12).
double policy_reward(const Policy& policy, const Predictor& f_star,
                     std::span<const double> context_dist);

// Lowest-index argmax over `values`; shared tie-break rule for the project.
int argmax_lowest_index(std::span<const double> values);

}  // namespace falcon
