#include "falcon/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "falcon/rng.hpp"

namespace falcon {

namespace {

double uniform_in(std::mt19937_64& gen, double lo, double hi) {
    return lo + uniform01(gen) * (hi - lo);
}

// One standard normal via Box-Muller (consumes two uniform draws).
double standard_normal(std::mt19937_64& gen) {
    const double u1 = 1.0 - uniform01(gen);  // (0, 1]
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::acos(-1.0) * u2);
}

}  // namespace

FiniteRealizableEnv::FiniteRealizableEnv(std::vector<double> context_dist,
                                         FiniteFunctionClass cls, int star_index)
    : context_dist_(std::move(context_dist)), class_(std::move(cls)), star_(star_index) {
    if (static_cast<int>(context_dist_.size()) != class_.num_contexts())
        throw std::invalid_argument("FiniteRealizableEnv: context distribution size mismatch");
    double total = 0.0;
    for (double p : context_dist_) {
        if (!(p >= 0.0))
            throw std::invalid_argument("FiniteRealizableEnv: negative context probability");
        total += p;
    }
    if (std::abs(total - 1.0) > kEqualityTol)
        throw std::invalid_argument("FiniteRealizableEnv: context distribution must sum to 1");
    if (star_ < 0 || star_ >= class_.size())
        throw std::invalid_argument("FiniteRealizableEnv: star index out of range");
    f_star_ = class_.member(star_);
}

RoundSample FiniteRealizableEnv::sample_round(std::mt19937_64& gen) const {
    RoundSample s;
    s.context.index = sample_index(context_dist_, uniform01(gen));
    const int K = num_actions();
    s.means.resize(static_cast<std::size_t>(K));
    s.rewards.resize(static_cast<std::size_t>(K));
    for (int a = 0; a < K; ++a) {
        const double mean = f_star_->at(s.context.index, a);
        s.means[static_cast<std::size_t>(a)] = mean;
        s.rewards[static_cast<std::size_t>(a)] = uniform01(gen) < mean ? 1.0 : 0.0;
    }
    return s;
}

LinearRealizableEnv::LinearRealizableEnv(LinearEnvParams params) : params_(std::move(params)) {
    if (params_.dimension < 1)
        throw std::invalid_argument("LinearRealizableEnv: dimension must be >= 1");
    if (params_.num_actions < 2)
        throw std::invalid_argument("LinearRealizableEnv: need >= 2 actions");
    if (params_.theta.empty()) {
        params_.theta.assign(static_cast<std::size_t>(params_.dimension),
                             1.0 / std::sqrt(static_cast<double>(params_.dimension)));
    }
    if (static_cast<int>(params_.theta.size()) != params_.dimension)
        throw std::invalid_argument("LinearRealizableEnv: theta dimension mismatch");
    double norm2 = 0.0;
    for (double v : params_.theta) norm2 += v * v;
    theta_norm_ = std::sqrt(norm2);
    if (!(theta_norm_ > 0.0) || theta_norm_ > 1.0 + 1e-9)
        throw std::invalid_argument("LinearRealizableEnv: ||theta||_2 must lie in (0, 1]");
    auto check_range = [](double lo, double hi, const char* which) {
        if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
            throw std::invalid_argument(std::string("LinearRealizableEnv: bad mean range for ") +
                                        which);
    };
    check_range(params_.hot_mean_lo, params_.hot_mean_hi, "hot arm");
    check_range(params_.cold_mean_lo, params_.cold_mean_hi, "cold arms");
    // Means are produced along theta, so they cannot exceed ||theta||.
    if (params_.hot_mean_hi > theta_norm_ + 1e-12)
        throw std::invalid_argument(
            "LinearRealizableEnv: hot mean range exceeds ||theta||, means would be infeasible");
}

RoundSample LinearRealizableEnv::sample_round(std::mt19937_64& gen) const {
    const int K = params_.num_actions;
    const int d = params_.dimension;
    RoundSample s;
    s.context.index = -1;
    s.context.action_features.resize(static_cast<std::size_t>(K));
    s.means.resize(static_cast<std::size_t>(K));
    s.rewards.resize(static_cast<std::size_t>(K));

    const int hot = std::min(K - 1, static_cast<int>(uniform01(gen) * K));
    std::vector<double> g(static_cast<std::size_t>(d));
    for (int a = 0; a < K; ++a) {
        const double mu = (a == hot) ? uniform_in(gen, params_.hot_mean_lo, params_.hot_mean_hi)
                                     : uniform_in(gen, params_.cold_mean_lo, params_.cold_mean_hi);
        // Feature = (mu / ||theta||^2) * theta + w with w orthogonal to theta,
        // so theta . feature = mu exactly and ||feature|| <= 1 by the scaling
        // of w below.
        for (int i = 0; i < d; ++i) g[static_cast<std::size_t>(i)] = standard_normal(gen);
        double dot = 0.0;
        for (int i = 0; i < d; ++i)
            dot += g[static_cast<std::size_t>(i)] * params_.theta[static_cast<std::size_t>(i)];
        const double inv_norm2 = 1.0 / (theta_norm_ * theta_norm_);
        std::vector<double> w(static_cast<std::size_t>(d));
        double wnorm2 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double wi = g[static_cast<std::size_t>(i)] -
                              dot * inv_norm2 * params_.theta[static_cast<std::size_t>(i)];
            w[static_cast<std::size_t>(i)] = wi;
            wnorm2 += wi * wi;
        }
        const double radial2 = mu * mu * inv_norm2;  // ||radial part||^2
        const double w_cap = std::sqrt(std::max(0.0, 1.0 - radial2));
        const double u_scale = uniform01(gen);  // always consumed: fixed draws per action
        const double scale = wnorm2 > 1e-24 ? u_scale * w_cap / std::sqrt(wnorm2) : 0.0;
        std::vector<double>& phi = s.context.action_features[static_cast<std::size_t>(a)];
        phi.resize(static_cast<std::size_t>(d));
        double mean = 0.0;
        for (int i = 0; i < d; ++i) {
            phi[static_cast<std::size_t>(i)] =
                mu * inv_norm2 * params_.theta[static_cast<std::size_t>(i)] +
                scale * w[static_cast<std::size_t>(i)];
            mean += phi[static_cast<std::size_t>(i)] * params_.theta[static_cast<std::size_t>(i)];
        }
        mean = std::clamp(mean, 0.0, 1.0);  // guards O(eps) drift from the projection
        s.means[static_cast<std::size_t>(a)] = mean;
        s.rewards[static_cast<std::size_t>(a)] = uniform01(gen) < mean ? 1.0 : 0.0;
    }
    return s;
}

FiniteRealizableEnv make_planted_instance(int num_contexts, int num_actions, int class_size,
                                          double gap, std::mt19937_64& gen) {
    if (num_contexts < 1) throw std::invalid_argument("make_planted_instance: need >= 1 context");
    if (num_actions < 2) throw std::invalid_argument("make_planted_instance: need >= 2 actions");
    if (class_size < 4) throw std::invalid_argument("make_planted_instance: class size >= 4");
    if (!(gap > 0.0 && gap <= 0.5))
        throw std::invalid_argument("make_planted_instance: gap must lie in (0, 0.5]");

    const std::size_t cells = static_cast<std::size_t>(num_contexts) * num_actions;

    // Planted truth: per context a unique best arm, a runner-up exactly
    // `gap`-plus-jitter below it, and the remaining arms clearly lower.
    std::vector<double> f_star(cells);
    for (int x = 0; x < num_contexts; ++x) {
        const int best = std::min(num_actions - 1, static_cast<int>(uniform01(gen) * num_actions));
        const double best_lo = std::max(0.65, gap + 0.15);
        const double mu_best = uniform_in(gen, best_lo, 0.95);
        const double runner = mu_best - gap - uniform01(gen) * 0.05;
        int runner_arm = best;
        if (num_actions >= 2) {
            runner_arm = std::min(num_actions - 2, static_cast<int>(uniform01(gen) * (num_actions - 1)));
            if (runner_arm >= best) ++runner_arm;
        }
        for (int a = 0; a < num_actions; ++a) {
            double v;
            if (a == best)
                v = mu_best;
            else if (a == runner_arm)
                v = runner;
            else
                v = uniform_in(gen, 0.01, std::max(0.02, runner - 0.15));
            f_star[static_cast<std::size_t>(x) * num_actions + a] = v;
        }
    }

    // Distractor members: f_star with at least half the cells redrawn, so every
    // distractor disagrees on >= 25% of cells and the class is genuinely
    // confusable before data arrives.
    const int star = std::min(class_size - 1, static_cast<int>(uniform01(gen) * class_size));
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(class_size));
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int j = 0; j < class_size; ++j) {
        if (j == star) {
            tables[static_cast<std::size_t>(j)] = f_star;
            continue;
        }
        std::vector<double> t = f_star;
        // Fisher-Yates on the cell order, driven by the same uniform stream.
        for (std::size_t i = cells; i > 1; --i) {
            const std::size_t k = static_cast<std::size_t>(uniform01(gen) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(k, i - 1)]);
        }
        const std::size_t redraw = (cells + 1) / 2;
        for (std::size_t i = 0; i < redraw; ++i) {
            const std::size_t cell = order[i];
            double v = uniform01(gen);
            while (std::abs(v - f_star[cell]) < 1e-3) v = uniform01(gen);
            t[cell] = v;
        }
        tables[static_cast<std::size_t>(j)] = std::move(t);
    }

    std::vector<double> dist(static_cast<std::size_t>(num_contexts),
                             1.0 / static_cast<double>(num_contexts));
    FiniteFunctionClass cls(num_contexts, num_actions, std::move(tables));
    return FiniteRealizableEnv(std::move(dist), std::move(cls), star);
}

}  // namespace falcon
