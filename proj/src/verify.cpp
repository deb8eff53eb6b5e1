#include "falcon/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "falcon/rng.hpp"
#include "falcon/schedule.hpp"

namespace falcon::verify {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

Kernel kernel_from(const Predictor& f, double gamma, int num_contexts, int num_actions) {
    Kernel k;
    k.gamma = gamma;
    k.per_context.reserve(static_cast<std::size_t>(num_contexts));
    for (int x = 0; x < num_contexts; ++x) {
        Context ctx;
        ctx.index = x;
        k.per_context.push_back(action_distribution(f, gamma, ctx, num_actions));
    }
    return k;
}

int PolicyMeasure::policy_action(long policy, int context) const {
    long p = policy;
    for (int x = 0; x < context; ++x) p /= num_actions;
    return static_cast<int>(p % num_actions);
}

PolicyMeasure product_measure(const Kernel& kernel) {
    const int X = kernel.num_contexts();
    const int K = kernel.num_actions();
    if (X < 1 || K < 2) throw std::invalid_argument("product_measure: degenerate kernel");
    if (static_cast<double>(X) * std::log2(static_cast<double>(K)) > 20.0 + 1e-9)
        throw std::invalid_argument(
            "product_measure: policy space exceeds 2^20, refusing to enumerate");
    long num_policies = 1;
    for (int x = 0; x < X; ++x) num_policies *= K;

    PolicyMeasure m;
    m.num_contexts = X;
    m.num_actions = K;
    m.q.assign(static_cast<std::size_t>(num_policies), 1.0);
    // Odometer over policy digits: digit x is the action played on context x.
    std::vector<int> digits(static_cast<std::size_t>(X), 0);
    for (long p = 0; p < num_policies; ++p) {
        double q = 1.0;
        for (int x = 0; x < X; ++x)
            q *= kernel.per_context[static_cast<std::size_t>(x)]
                     .probs[static_cast<std::size_t>(digits[static_cast<std::size_t>(x)])];
        m.q[static_cast<std::size_t>(p)] = q;
        for (int x = 0; x < X; ++x) {
            if (++digits[static_cast<std::size_t>(x)] < K) break;
            digits[static_cast<std::size_t>(x)] = 0;
        }
    }
    return m;
}

double marginalization_error(const Kernel& kernel, const PolicyMeasure& measure) {
    const int X = measure.num_contexts;
    const int K = measure.num_actions;
    std::vector<double> marg(static_cast<std::size_t>(X) * static_cast<std::size_t>(K), 0.0);
    std::vector<int> digits(static_cast<std::size_t>(X), 0);
    for (long p = 0; p < measure.num_policies(); ++p) {
        const double q = measure.q[static_cast<std::size_t>(p)];
        for (int x = 0; x < X; ++x)
            marg[static_cast<std::size_t>(x) * K +
                 static_cast<std::size_t>(digits[static_cast<std::size_t>(x)])] += q;
        for (int x = 0; x < X; ++x) {
            if (++digits[static_cast<std::size_t>(x)] < K) break;
            digits[static_cast<std::size_t>(x)] = 0;
        }
    }
    double worst = 0.0;
    for (int x = 0; x < X; ++x) {
        for (int a = 0; a < K; ++a) {
            const double diff =
                std::abs(marg[static_cast<std::size_t>(x) * K + static_cast<std::size_t>(a)] -
                         kernel.per_context[static_cast<std::size_t>(x)]
                             .probs[static_cast<std::size_t>(a)]);
            worst = std::max(worst, diff);
        }
    }
    return worst;
}

EnumerableInstance make_instance(const FiniteRealizableEnv& env, const Predictor& f_hat) {
    EnumerableInstance inst;
    inst.num_contexts = env.num_contexts();
    inst.num_actions = env.num_actions();
    inst.context_dist = env.context_dist();
    const std::size_t cells =
        static_cast<std::size_t>(inst.num_contexts) * static_cast<std::size_t>(inst.num_actions);
    inst.f_star.resize(cells);
    inst.f_hat.resize(cells);
    for (int x = 0; x < inst.num_contexts; ++x) {
        Context ctx;
        ctx.index = x;
        for (int a = 0; a < inst.num_actions; ++a) {
            inst.f_star[static_cast<std::size_t>(x) * inst.num_actions + a] = env.f_star().at(x, a);
            inst.f_hat[static_cast<std::size_t>(x) * inst.num_actions + a] = f_hat.eval(ctx, a);
        }
    }
    return inst;
}

namespace {

// Per-context regret gaps (best value minus played value) for a value table.
std::vector<double> gap_table(const std::vector<double>& values, int X, int K) {
    std::vector<double> gaps(values.size());
    for (int x = 0; x < X; ++x) {
        double best = values[static_cast<std::size_t>(x) * K];
        for (int a = 1; a < K; ++a)
            best = std::max(best, values[static_cast<std::size_t>(x) * K + a]);
        for (int a = 0; a < K; ++a)
            gaps[static_cast<std::size_t>(x) * K + a] =
                best - values[static_cast<std::size_t>(x) * K + a];
    }
    return gaps;
}

}  // namespace

ImplicitTable implicit_quantities(const EnumerableInstance& inst) {
    const int X = inst.num_contexts;
    const int K = inst.num_actions;
    const auto star_gaps = gap_table(inst.f_star, X, K);
    const auto hat_gaps = gap_table(inst.f_hat, X, K);
    long num_policies = 1;
    for (int x = 0; x < X; ++x) num_policies *= K;
    ImplicitTable t;
    t.reg.assign(static_cast<std::size_t>(num_policies), 0.0);
    t.reg_hat.assign(static_cast<std::size_t>(num_policies), 0.0);
    std::vector<int> digits(static_cast<std::size_t>(X), 0);
    for (long p = 0; p < num_policies; ++p) {
        double reg = 0.0;
        double reg_hat = 0.0;
        for (int x = 0; x < X; ++x) {
            const auto cell = static_cast<std::size_t>(x) * K +
                              static_cast<std::size_t>(digits[static_cast<std::size_t>(x)]);
            reg += inst.context_dist[static_cast<std::size_t>(x)] * star_gaps[cell];
            reg_hat += inst.context_dist[static_cast<std::size_t>(x)] * hat_gaps[cell];
        }
        t.reg[static_cast<std::size_t>(p)] = reg;
        t.reg_hat[static_cast<std::size_t>(p)] = reg_hat;
        for (int x = 0; x < X; ++x) {
            if (++digits[static_cast<std::size_t>(x)] < K) break;
            digits[static_cast<std::size_t>(x)] = 0;
        }
    }
    return t;
}

IopReport check_iop(const Kernel& kernel, const EnumerableInstance& inst,
                    const PolicyMeasure& measure, const ImplicitTable& table) {
    const int X = inst.num_contexts;
    const int K = inst.num_actions;
    IopReport rep;
    rep.policies_checked = measure.num_policies();
    rep.exploitation_bound = static_cast<double>(K) / kernel.gamma;

    double lhs = 0.0;
    for (long p = 0; p < measure.num_policies(); ++p)
        lhs += measure.q[static_cast<std::size_t>(p)] * table.reg_hat[static_cast<std::size_t>(p)];
    rep.exploitation_lhs = lhs;
    rep.exploitation_ok = lhs <= rep.exploitation_bound + kIopTol;

    double worst = -std::numeric_limits<double>::infinity();
    std::vector<int> digits(static_cast<std::size_t>(X), 0);
    for (long p = 0; p < measure.num_policies(); ++p) {
        double inv_mass = 0.0;
        for (int x = 0; x < X; ++x)
            inv_mass += inst.context_dist[static_cast<std::size_t>(x)] /
                        kernel.per_context[static_cast<std::size_t>(x)]
                            .probs[static_cast<std::size_t>(digits[static_cast<std::size_t>(x)])];
        const double rhs = static_cast<double>(K) +
                           kernel.gamma * table.reg_hat[static_cast<std::size_t>(p)];
        worst = std::max(worst, inv_mass - rhs);
        for (int x = 0; x < X; ++x) {
            if (++digits[static_cast<std::size_t>(x)] < K) break;
            digits[static_cast<std::size_t>(x)] = 0;
        }
    }
    rep.worst_exploration_slack = worst;
    rep.exploration_ok = worst <= kIopTol;
    return rep;
}

EquiReport check_equi(const Kernel& kernel, const EnumerableInstance& inst, long draws,
                      std::mt19937_64& gen) {
    if (draws < 2) throw std::invalid_argument("check_equi: need at least 2 draws");
    const PolicyMeasure measure = product_measure(kernel);
    const ImplicitTable table = implicit_quantities(inst);
    EquiReport rep;
    rep.draws = draws;
    for (long p = 0; p < measure.num_policies(); ++p)
        rep.exact +=
            measure.q[static_cast<std::size_t>(p)] * table.reg[static_cast<std::size_t>(p)];

    const int X = inst.num_contexts;
    const int K = inst.num_actions;
    // Optimal action per context under the truth (lowest-index argmax).
    std::vector<int> best(static_cast<std::size_t>(X));
    for (int x = 0; x < X; ++x) {
        std::span<const double> row(inst.f_star.data() + static_cast<std::size_t>(x) * K,
                                    static_cast<std::size_t>(K));
        best[static_cast<std::size_t>(x)] = argmax_lowest_index(row);
    }

    double sum = 0.0;
    double sumsq = 0.0;
    std::vector<double> rewards(static_cast<std::size_t>(K));
    for (long i = 0; i < draws; ++i) {
        const int x = sample_index(inst.context_dist, uniform01(gen));
        for (int a = 0; a < K; ++a) {
            const double mean = inst.f_star[static_cast<std::size_t>(x) * K + a];
            rewards[static_cast<std::size_t>(a)] = uniform01(gen) < mean ? 1.0 : 0.0;
        }
        const int a = sample_index(kernel.per_context[static_cast<std::size_t>(x)].probs,
                                   uniform01(gen));
        const double v = rewards[static_cast<std::size_t>(best[static_cast<std::size_t>(x)])] -
                         rewards[static_cast<std::size_t>(a)];
        sum += v;
        sumsq += v * v;
    }
    const double n = static_cast<double>(draws);
    rep.mc_estimate = sum / n;
    const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0));
    rep.mc_stderr = std::sqrt(var / n);
    rep.pass = std::abs(rep.mc_estimate - rep.exact) <= 4.0 * rep.mc_stderr + 1e-12;
    return rep;
}

RegretBandReport check_regret_bands(const ImplicitTable& table, double gamma, int num_actions,
                                    double c0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("check_regret_bands: gamma must be > 0");
    RegretBandReport rep;
    const double budget = c0 * static_cast<double>(num_actions) / gamma;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < table.reg.size(); ++p) {
        worst = std::max(worst, table.reg[p] - 2.0 * table.reg_hat[p] - budget);
        worst = std::max(worst, table.reg_hat[p] - 2.0 * table.reg[p] - budget);
    }
    rep.worst_slack = worst;
    rep.hold = worst <= kIopTol;
    return rep;
}

FiniteRealizableEnv random_enumerable_instance(std::mt19937_64& gen, int max_contexts,
                                               int max_actions) {
    const int X = 1 + static_cast<int>(uniform01(gen) * max_contexts) % max_contexts;
    const int K = 2 + static_cast<int>(uniform01(gen) * (max_actions - 1)) % (max_actions - 1);
    const int F = 4 + static_cast<int>(uniform01(gen) * 5) % 5;
    const std::size_t cells = static_cast<std::size_t>(X) * static_cast<std::size_t>(K);
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(F));
    for (auto& t : tables) {
        t.resize(cells);
        for (auto& v : t) v = uniform01(gen);
    }
    const int star = static_cast<int>(uniform01(gen) * F) % F;
    std::vector<double> dist(static_cast<std::size_t>(X));
    double total = 0.0;
    for (auto& p : dist) {
        p = 0.1 + uniform01(gen);
        total += p;
    }
    for (auto& p : dist) p /= total;
    // Renormalize the tail mass so the sum is exactly 1 within tolerance.
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) acc += dist[i];
    dist.back() = 1.0 - acc;
    return FiniteRealizableEnv(std::move(dist), FiniteFunctionClass(X, K, std::move(tables)),
                               star);
}

bool SuiteReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string SuiteReport::render() const {
    std::ostringstream out;
    for (const auto& c : checks)
        out << (c.pass ? "[pass] " : "[FAIL] ") << c.name << " — " << c.detail << "\n";
    return out.str();
}

SuiteReport run_suite(const SuiteOptions& opts) {
    if (opts.instances < 1) throw std::invalid_argument("run_suite: need >= 1 instance");

    double worst_marg = 0.0;
    double worst_measure_sum = 0.0;
    double min_measure_entry = std::numeric_limits<double>::infinity();
    double worst_exploit = -std::numeric_limits<double>::infinity();
    double worst_explore = -std::numeric_limits<double>::infinity();
    double worst_equi_z = 0.0;
    long equi_failures = 0;
    long band_failures = 0;
    long kernels_checked = 0;

    for (int i = 0; i < opts.instances; ++i) {
        std::mt19937_64 inst_gen(derive_seed(opts.seed, 3 * static_cast<std::uint64_t>(i)));
        std::mt19937_64 env_gen(derive_seed(opts.seed, 3 * static_cast<std::uint64_t>(i) + 1));
        std::mt19937_64 alg_gen(derive_seed(opts.seed, 3 * static_cast<std::uint64_t>(i) + 2));
        const FiniteRealizableEnv env = random_enumerable_instance(inst_gen);
        const EpochSchedule schedule = EpochSchedule::geometric();
        FalconBandit bandit(env.function_class(), opts.delta);

        InteractionLog log;
        int current_epoch = 0;
        bool instance_band_failed = false;
        Kernel last_kernel;
        EnumerableInstance last_inst;
        for (long t = 1; t <= opts.horizon; ++t) {
            const int m = schedule.epoch_of(t);
            if (m != current_epoch) {
                bandit.begin_epoch(m, log, schedule);
                current_epoch = m;

                const Kernel kernel = kernel_from(bandit.predictor(), bandit.gamma(),
                                                  env.num_contexts(), env.num_actions());
                const PolicyMeasure measure = product_measure(kernel);
                const EnumerableInstance inst = make_instance(env, bandit.predictor());
                const ImplicitTable table = implicit_quantities(inst);
                ++kernels_checked;

                worst_marg = std::max(worst_marg, marginalization_error(kernel, measure));
                double qsum = 0.0;
                for (double q : measure.q) {
                    qsum += q;
                    min_measure_entry = std::min(min_measure_entry, q);
                }
                worst_measure_sum = std::max(worst_measure_sum, std::abs(qsum - 1.0));

                const IopReport iop = check_iop(kernel, inst, measure, table);
                worst_exploit = std::max(worst_exploit,
                                         iop.exploitation_lhs - iop.exploitation_bound);
                worst_explore = std::max(worst_explore, iop.worst_exploration_slack);

                if (m >= 2) {
                    const RegretBandReport bands =
                        check_regret_bands(table, kernel.gamma, env.num_actions());
                    if (!bands.hold) instance_band_failed = true;
                }
                last_kernel = kernel;
                last_inst = inst;
            }
            RoundSample sample = env.sample_round(env_gen);
            const StepOutcome step = bandit.step(sample.context, alg_gen);
            log.append(std::move(sample.context), step.action,
                       sample.rewards[static_cast<std::size_t>(step.action)]);
        }
        if (instance_band_failed) ++band_failures;

        const EquiReport equi = check_equi(last_kernel, last_inst, opts.equi_draws, env_gen);
        if (!equi.pass) ++equi_failures;
        if (equi.mc_stderr > 0.0)
            worst_equi_z = std::max(worst_equi_z,
                                    std::abs(equi.mc_estimate - equi.exact) / equi.mc_stderr);
    }

    SuiteReport rep;
    auto add = [&rep](const std::string& name, bool pass, const std::string& detail) {
        rep.checks.push_back(CheckResult{name, pass, detail});
    };
    add("kernel-marginalization", worst_marg <= 1e-12,
        "max |policy-mass(x,a) - p(a|x)| = " + fmt(worst_marg) + " over " +
            std::to_string(kernels_checked) + " kernels (tol 1e-12)");
    add("policy-measure",
        min_measure_entry >= 0.0 && worst_measure_sum <= 1e-12,
        "min entry " + fmt(min_measure_entry) + ", max |sum - 1| = " + fmt(worst_measure_sum));
    add("exploitation-constraint", worst_exploit <= kIopTol,
        "max (avg estimated regret - K/gamma) = " + fmt(worst_exploit) + " (tol 1e-9)");
    add("exploration-constraint", worst_explore <= kIopTol,
        "max (E[1/p] - K - gamma*RegHat) = " + fmt(worst_explore) + " (tol 1e-9)");
    add("regret-equivalence", equi_failures == 0,
        std::to_string(opts.instances - equi_failures) + "/" + std::to_string(opts.instances) +
            " instances within 4 standard errors (worst z = " + fmt(worst_equi_z) + ")");
    const double band_rate =
        static_cast<double>(band_failures) / static_cast<double>(opts.instances);
    add("regret-estimate-bands", band_rate <= 2.0 * opts.delta,
        "failure rate " + fmt(band_rate) + " (budget " + fmt(2.0 * opts.delta) + ", c0 = 5.15)");
    return rep;
}

}  // namespace falcon::verify
