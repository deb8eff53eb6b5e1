#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "falcon/core.hpp"
#include "falcon/rng.hpp"

namespace {

using namespace falcon;

Context finite_context(int index) {
    Context x;
    x.index = index;
    return x;
}

std::vector<double> random_table(int contexts, int actions, std::mt19937_64& gen) {
    std::vector<double> v(static_cast<std::size_t>(contexts) * actions);
    for (double& e : v) e = uniform01(gen);
    return v;
}

// Independent argmax oracle: exhaustive scan keeping the first maximum.
int scan_argmax(const std::vector<double>& vals) {
    int best = 0;
    for (int i = 0; i < static_cast<int>(vals.size()); ++i) {
        if (vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("argmax_lowest_index picks first maximum") {
    CHECK(argmax_lowest_index(std::vector<double>{0.1, 0.9, 0.3}) == 1);
    CHECK(argmax_lowest_index(std::vector<double>{0.5, 0.5, 0.5}) == 0);
    CHECK(argmax_lowest_index(std::vector<double>{0.2, 0.7, 0.7}) == 1);
    CHECK(argmax_lowest_index(std::vector<double>{0.4}) == 0);
    CHECK_THROWS_AS(argmax_lowest_index(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("TablePredictor stores and validates a reward table") {
    TablePredictor f(2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 7);
    CHECK(f.num_contexts() == 2);
    CHECK(f.num_actions() == 3);
    CHECK(f.id() == 7);
    CHECK(f.at(0, 0) == doctest::Approx(0.1));
    CHECK(f.at(1, 2) == doctest::Approx(0.6));
    CHECK(f.eval(finite_context(1), 0) == doctest::Approx(0.4));

    SUBCASE("default member id is -1") {
        TablePredictor g(1, 2, {0.0, 1.0});
        CHECK(g.id() == -1);
    }
    SUBCASE("wrong table size rejected") {
        CHECK_THROWS_AS(TablePredictor(2, 3, {0.1, 0.2}), std::invalid_argument);
    }
    SUBCASE("values outside [0,1] rejected") {
        CHECK_THROWS_AS(TablePredictor(1, 2, {0.5, 1.5}), std::invalid_argument);
        CHECK_THROWS_AS(TablePredictor(1, 2, {-0.1, 0.5}), std::invalid_argument);
    }
    SUBCASE("out-of-range lookups rejected") {
        CHECK_THROWS_AS(f.at(2, 0), std::out_of_range);
        CHECK_THROWS_AS(f.at(0, 3), std::out_of_range);
        CHECK_THROWS_AS(f.at(-1, 0), std::out_of_range);
    }
}

TEST_CASE("LinearPredictor evaluates clamped dot products and counts clamps") {
    LinearPredictor f({0.5, 0.5});
    Context x;
    x.action_features = {{0.4, 0.8}, {3.0, 1.0}, {-2.0, 0.0}};

    CHECK(f.eval(x, 0) == doctest::Approx(0.6));
    CHECK(f.clamp_events() == 0);
    CHECK(f.eval(x, 1) == doctest::Approx(1.0));  // raw 2.0, clamped
    CHECK(f.eval(x, 2) == doctest::Approx(0.0));  // raw -1.0, clamped
    CHECK(f.clamp_events() == 2);

    SUBCASE("feature dimension mismatch rejected") {
        Context bad;
        bad.action_features = {{1.0, 2.0, 3.0}};
        CHECK_THROWS_AS(f.eval(bad, 0), std::invalid_argument);
    }
    SUBCASE("missing action features rejected") {
        CHECK_THROWS_AS(f.eval(x, 3), std::out_of_range);
    }
    SUBCASE("empty parameter vector rejected") {
        CHECK_THROWS_AS(LinearPredictor(std::vector<double>{}), std::invalid_argument);
    }
}

TEST_CASE("FiniteFunctionClass exposes members as predictors") {
    std::vector<std::vector<double>> tables = {
        {0.1, 0.9}, {0.8, 0.2}, {0.5, 0.5}, {0.3, 0.7}};
    FiniteFunctionClass cls(1, 2, tables);
    CHECK(cls.size() == 4);
    CHECK(cls.value(1, 0, 0) == doctest::Approx(0.8));
    CHECK(cls.table(3) == tables[3]);

    auto f = cls.member(2);
    CHECK(f->id() == 2);
    CHECK(f->eval(finite_context(0), 1) == doctest::Approx(0.5));

    SUBCASE("fewer than 4 members rejected") {
        CHECK_THROWS_AS(FiniteFunctionClass(1, 2, {{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}}),
                        std::invalid_argument);
    }
    SUBCASE("member table with wrong size rejected") {
        auto bad = tables;
        bad[2] = {0.5};
        CHECK_THROWS_AS(FiniteFunctionClass(1, 2, bad), std::invalid_argument);
    }
    SUBCASE("entries outside [0,1] rejected") {
        auto bad = tables;
        bad[0][1] = 1.2;
        CHECK_THROWS_AS(FiniteFunctionClass(1, 2, bad), std::invalid_argument);
    }
    SUBCASE("member index out of range rejected") {
        CHECK_THROWS_AS(cls.table(4), std::out_of_range);
        CHECK_THROWS_AS(cls.value(-1, 0, 0), std::out_of_range);
    }
}

TEST_CASE("InteractionLog keeps contiguous rounds and validates rewards") {
    InteractionLog log;
    CHECK(log.empty());
    log.append(finite_context(0), 1, 0.5);
    log.append(finite_context(1), 0, 1.0);
    log.append(finite_context(2), 2, 0.0);
    CHECK(log.size() == 3);
    CHECK(log.all()[0].round == 1);
    CHECK(log.all()[2].round == 3);
    CHECK(log.all()[1].action == 0);

    SUBCASE("rewards outside [0,1] rejected") {
        CHECK_THROWS_AS(log.append(finite_context(0), 0, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(log.append(finite_context(0), 0, 1.1), std::invalid_argument);
        CHECK_THROWS_AS(log.append(finite_context(0), 0, std::nan("")), std::invalid_argument);
    }
    SUBCASE("range returns 1-based inclusive spans") {
        auto mid = log.range(2, 3);
        REQUIRE(mid.size() == 2);
        CHECK(mid[0].round == 2);
        CHECK(mid[1].round == 3);
        CHECK(log.range(1, 3).size() == 3);
        CHECK(log.range(3, 2).empty());  // empty span allowed
        CHECK_THROWS_AS(log.range(0, 2), std::out_of_range);
        CHECK_THROWS_AS(log.range(1, 4), std::out_of_range);
    }
}

TEST_CASE("induced_policy matches an exhaustive per-context scan") {
    // Random table, |X|=4, K=5, checked against a brute-force argmax per row.
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 50; ++trial) {
        TablePredictor f(4, 5, random_table(4, 5, gen));
        Policy pi = induced_policy(f, 4, 5);
        REQUIRE(pi.num_contexts() == 4);
        for (int x = 0; x < 4; ++x) {
            std::vector<double> row(5);
            for (int a = 0; a < 5; ++a) row[static_cast<std::size_t>(a)] = f.at(x, a);
            CHECK(pi(x) == scan_argmax(row));
        }
    }

    SUBCASE("ties break toward the lowest action index") {
        TablePredictor f(2, 3, {0.4, 0.4, 0.4, 0.2, 0.9, 0.9});
        Policy pi = induced_policy(f, 2, 3);
        CHECK(pi(0) == 0);
        CHECK(pi(1) == 1);
    }
}

TEST_CASE("policy_reward equals the Monte Carlo estimate") {
    // |X|=5 random instance: exact expectation vs 10^6 context draws.
    std::mt19937_64 gen(17);
    const int contexts = 5;
    const int actions = 3;
    TablePredictor f_star(contexts, actions, random_table(contexts, actions, gen));
    std::vector<double> dist = {0.1, 0.25, 0.3, 0.15, 0.2};
    Policy pi;
    pi.actions = {2, 0, 1, 1, 0};

    const double exact = policy_reward(pi, f_star, dist);

    const long draws = 1000000;
    double sum = 0.0;
    double sumsq = 0.0;
    for (long i = 0; i < draws; ++i) {
        const int x = sample_index(dist, uniform01(gen));
        const double v = f_star.at(x, pi(x));
        sum += v;
        sumsq += v * v;
    }
    const double mc = sum / static_cast<double>(draws);
    const double var = sumsq / static_cast<double>(draws) - mc * mc;
    const double se = std::sqrt(var / static_cast<double>(draws));
    CAPTURE(exact);
    CAPTURE(mc);
    CAPTURE(se);
    CHECK(std::abs(exact - mc) <= 3.0 * se);

    SUBCASE("hand example") {
        TablePredictor g(2, 2, {0.0, 1.0, 1.0, 0.0});
        Policy best;
        best.actions = {1, 0};
        CHECK(policy_reward(best, g, std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
        Policy worst;
        worst.actions = {0, 1};
        CHECK(policy_reward(worst, g, std::vector<double>{0.25, 0.75}) == doctest::Approx(0.0));
    }
    SUBCASE("context distribution must sum to 1") {
        CHECK_THROWS_AS(policy_reward(pi, f_star, std::vector<double>{0.5, 0.5, 0.5, 0.1, 0.1}),
                        std::invalid_argument);
    }
    SUBCASE("negative probabilities rejected") {
        CHECK_THROWS_AS(policy_reward(pi, f_star, std::vector<double>{0.5, 0.7, -0.2, 0.5, 0.5}),
                        std::invalid_argument);
    }
    SUBCASE("size mismatch rejected") {
        CHECK_THROWS_AS(policy_reward(pi, f_star, std::vector<double>{1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("seed derivation produces distinct deterministic streams") {
    const std::uint64_t base = 123456789;
    CHECK(derive_seed(base, 0) == derive_seed(base, 0));
    CHECK(derive_seed(base, 0) != derive_seed(base, 1));
    CHECK(derive_seed(base, 1) != derive_seed(base, 2));
    CHECK(derive_seed(base, 0) != derive_seed(base + 1, 0));
}

TEST_CASE("uniform01 stays in [0,1) and sample_index inverts the CDF") {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 10000; ++i) {
        const double u = uniform01(gen);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }

    const std::vector<double> probs = {1.0 / 7.0, 6.0 / 7.0};
    CHECK(sample_index(probs, 0.5) == 1);  // CDF of action 0 is 1/7 < 0.5
    CHECK(sample_index(probs, 0.1) == 0);
    CHECK(sample_index(probs, 0.999999) == 1);

    SUBCASE("u at 1 - eps lands on the last index even with rounding slack") {
        const std::vector<double> third = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        CHECK(sample_index(third, std::nextafter(1.0, 0.0)) == 2);
    }
    SUBCASE("empirical frequencies match probabilities") {
        const std::vector<double> p = {0.15, 0.35, 0.5};
        std::vector<long> counts(3, 0);
        const long n = 1000000;
        for (long i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_index(p, uniform01(gen)))];
        for (int a = 0; a < 3; ++a) {
            const double freq = static_cast<double>(counts[static_cast<std::size_t>(a)]) /
                                static_cast<double>(n);
            const double se = std::sqrt(p[static_cast<std::size_t>(a)] *
                                        (1.0 - p[static_cast<std::size_t>(a)]) /
                                        static_cast<double>(n));
            CAPTURE(a);
            CHECK(std::abs(freq - p[static_cast<std::size_t>(a)]) <= 4.0 * se);
        }
    }
}

}  // TEST_SUITE("core")
