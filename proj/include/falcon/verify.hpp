#pragma once

// Brute-force verification of the randomized kernel's policy-space
// interpretation on small enumerable instances.
//
// A per-context action kernel p(a | x) induces a product measure Q over the
// full policy space Psi = A^X, Q(pi) = prod_x p(pi(x) | x). This module
// enumerates Psi outright (refusing when |X| * log2(K) > 20) and checks:
//   - marginalization: sum_{pi: pi(x) = a} Q(pi) = p(a | x) exactly;
//   - the implicit optimization problem the kernel solves: low estimated
//     regret in expectation (exploitation) and bounded inverse-probability
//     mass per policy (exploration);
//   - equivalence of expected instantaneous regret with the policy-space
//     average sum_pi Q(pi) Reg(pi), via exact enumeration against Monte
//     Carlo simulation;
//   - two-sided bands tying true and estimated policy regret.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "falcon/algo.hpp"
#include "falcon/env.hpp"

namespace falcon::verify {

// Action kernel of one epoch on a finite context space.
struct Kernel {
    double gamma = 0.0;
    std::vector<ActionDistribution> per_context;

    int num_contexts() const { return static_cast<int>(per_context.size()); }
    int num_actions() const {
        return per_context.empty() ? 0 : static_cast<int>(per_context.front().probs.size());
    }
};

// Inverse-gap-weighting kernel of predictor `f` at rate `gamma`, tabulated
// over all finite contexts.
Kernel kernel_from(const Predictor& f, double gamma, int num_contexts, int num_actions);

// Explicit distribution over all K^|X| deterministic policies. Policies are
// numbered in mixed radix: policy `p` plays digit x of p (base K) on context x.
struct PolicyMeasure {
    int num_contexts = 0;
    int num_actions = 0;
    std::vector<double> q;  // size K^|X|

    long num_policies() const { return static_cast<long>(q.size()); }
    int policy_action(long policy, int context) const;
};

// Product measure induced by the kernel. Throws when the policy space
// exceeds 2^20 (no sampling fallback — this module is exact by design).
PolicyMeasure product_measure(const Kernel& kernel);

// Largest |sum_{pi: pi(x)=a} Q(pi) - p(a|x)| over all (x, a).
double marginalization_error(const Kernel& kernel, const PolicyMeasure& measure);

// The exact world needed to score policies: true means, estimated means,
// context distribution.
struct EnumerableInstance {
    int num_contexts = 0;
    int num_actions = 0;
    std::vector<double> context_dist;
    std::vector<double> f_star;  // row-major |X| x K
    std::vector<double> f_hat;   // row-major |X| x K
};

EnumerableInstance make_instance(const FiniteRealizableEnv& env, const Predictor& f_hat);

// Per-policy true regret Reg(pi) and estimated regret RegHat(pi) relative to
// the greedy policies of f_star / f_hat.
struct ImplicitTable {
    std::vector<double> reg;
    std::vector<double> reg_hat;
};

ImplicitTable implicit_quantities(const EnumerableInstance& inst);

// Feasibility of the kernel's implicit optimization problem.
struct IopReport {
    double exploitation_lhs = 0.0;    // sum_pi Q(pi) RegHat(pi)
    double exploitation_bound = 0.0;  // K / gamma
    bool exploitation_ok = false;
    double worst_exploration_slack = 0.0;  // max over pi of lhs - rhs
    bool exploration_ok = false;
    long policies_checked = 0;

    bool pass() const { return exploitation_ok && exploration_ok; }
};

inline constexpr double kIopTol = 1e-9;

IopReport check_iop(const Kernel& kernel, const EnumerableInstance& inst,
                    const PolicyMeasure& measure, const ImplicitTable& table);

// Exact policy-space average regret vs Monte Carlo expected instantaneous
// regret of play under the kernel; passes when they agree within 4 standard
// errors.
struct EquiReport {
    double exact = 0.0;
    double mc_estimate = 0.0;
    double mc_stderr = 0.0;
    long draws = 0;
    bool pass = false;
};

EquiReport check_equi(const Kernel& kernel, const EnumerableInstance& inst, long draws,
                      std::mt19937_64& gen);

// Two-sided regret-estimate bands with constant c0: for every policy,
//   Reg    <= 2 RegHat + c0 K / gamma   and   RegHat <= 2 Reg + c0 K / gamma.
struct RegretBandReport {
    bool hold = false;
    double worst_slack = 0.0;  // most positive violation of either inequality
};

inline constexpr double kRegretBandConstant = 5.15;

RegretBandReport check_regret_bands(const ImplicitTable& table, double gamma, int num_actions,
                                    double c0 = kRegretBandConstant);

// Random small instance for fuzzing: 1..max_contexts contexts, 2..max_actions
// actions, a random class of 4..8 members with a random planted truth, and a
// random (non-degenerate) context distribution.
FiniteRealizableEnv random_enumerable_instance(std::mt19937_64& gen, int max_contexts = 3,
                                               int max_actions = 4);

// Aggregate suite used by tests and the `verify` CLI subcommand.
struct SuiteOptions {
    int instances = 20;
    long horizon = 64;          // length of the kernel-generating runs
    long equi_draws = 200000;   // Monte Carlo draws per instance
    double delta = 0.1;         // delta for the generating runs and band budget
    std::uint64_t seed = 20240901;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
    std::string render() const;  // one line per check
};

SuiteReport run_suite(const SuiteOptions& opts);

}  // namespace falcon::verify
