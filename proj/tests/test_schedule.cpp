#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "falcon/schedule.hpp"

namespace {

using namespace falcon;

}  // namespace

TEST_SUITE("schedule") {

TEST_CASE("geometric boundaries are powers of two") {
    EpochSchedule s = EpochSchedule::geometric();
    CHECK(s.kind() == EpochSchedule::Kind::geometric);
    CHECK_FALSE(s.finite());
    CHECK(s.boundary(0) == 0);
    CHECK(s.boundary(1) == 2);
    CHECK(s.boundary(2) == 4);
    CHECK(s.boundary(10) == 1024);
    CHECK(s.boundary(61) == (1L << 61));
    CHECK_THROWS_AS(s.boundary(62), std::out_of_range);
    CHECK_THROWS_AS(s.num_epochs(), std::logic_error);

    SUBCASE("T=1000 expands to 2,4,...,1024 (10 epochs)") {
        const std::vector<long> expect = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
        CHECK(s.boundaries_up_to(1000) == expect);
        CHECK(s.epochs_entered(1000) == 10);
    }
    SUBCASE("T=10^5 enters 17 epochs") {
        CHECK(s.epochs_entered(100000) == 17);
        CHECK(s.boundaries_up_to(100000).size() == 17);
        CHECK(s.boundaries_up_to(100000).back() == 131072);
    }
}

TEST_CASE("geometric epoch_of is the smallest m with t <= 2^m") {
    EpochSchedule s = EpochSchedule::geometric();
    CHECK(s.epoch_of(1) == 1);
    CHECK(s.epoch_of(2) == 1);
    CHECK(s.epoch_of(3) == 2);
    CHECK(s.epoch_of(4) == 2);
    CHECK(s.epoch_of(5) == 3);  // tau_2 = 4 < 5 <= tau_3 = 8
    CHECK(s.epoch_of(8) == 3);
    CHECK(s.epoch_of(9) == 4);
    CHECK(s.epoch_of(1024) == 10);
    CHECK(s.epoch_of(1025) == 11);
    CHECK_THROWS_AS(s.epoch_of(0), std::invalid_argument);
    CHECK_THROWS_AS(s.epoch_of(-3), std::invalid_argument);

    SUBCASE("agrees with a definition scan over small rounds") {
        for (long t = 1; t <= 4096; ++t) {
            int m = 1;
            while (s.boundary(m) < t) ++m;
            CAPTURE(t);
            CHECK(s.epoch_of(t) == m);
        }
    }
}

TEST_CASE("known-horizon boundaries follow ceil(T^(1-2^-m)) with dedup and cap") {
    SUBCASE("T=100") {
        EpochSchedule s = EpochSchedule::known_horizon(100);
        const std::vector<long> expect = {10, 32, 57, 75, 87, 94, 97, 99, 100};
        CHECK(s.finite());
        CHECK(s.num_epochs() == 9);
        CHECK(s.boundaries_up_to(100) == expect);
        CHECK(s.boundary(1) == 10);
        CHECK(s.boundary(9) == 100);
        CHECK(s.epoch_of(100) == 9);
        CHECK(s.epoch_of(10) == 1);
        CHECK(s.epoch_of(11) == 2);
    }
    SUBCASE("T=4 dedups to 2,3,4") {
        EpochSchedule s = EpochSchedule::known_horizon(4);
        CHECK(s.boundaries_up_to(4) == std::vector<long>{2, 3, 4});
        CHECK(s.num_epochs() == 3);
    }
    SUBCASE("exact powers do not round up from representation error") {
        // T = 65536: tau_1 = T^(1/2) = 256 exactly.
        EpochSchedule s = EpochSchedule::known_horizon(65536);
        CHECK(s.boundary(1) == 256);
    }
    SUBCASE("last boundary is exactly the horizon") {
        for (long T : {2L, 3L, 7L, 100L, 1000L, 12345L}) {
            EpochSchedule s = EpochSchedule::known_horizon(T);
            CAPTURE(T);
            CHECK(s.boundary(s.num_epochs()) == T);
            CHECK(s.epoch_of(T) == s.num_epochs());
        }
    }
    SUBCASE("boundaries are strictly increasing") {
        for (long T : {2L, 5L, 17L, 64L, 999L, 4096L, 100000L}) {
            EpochSchedule s = EpochSchedule::known_horizon(T);
            long prev = 0;
            for (int m = 1; m <= s.num_epochs(); ++m) {
                CAPTURE(T);
                CAPTURE(m);
                CHECK(s.boundary(m) > prev);
                prev = s.boundary(m);
            }
        }
    }
    SUBCASE("horizon below 2 rejected") {
        CHECK_THROWS_AS(EpochSchedule::known_horizon(1), std::invalid_argument);
        CHECK_THROWS_AS(EpochSchedule::known_horizon(0), std::invalid_argument);
    }
}

TEST_CASE("finite schedules are exhausted past their last boundary") {
    EpochSchedule kh = EpochSchedule::known_horizon(100);
    CHECK_THROWS_AS(kh.epoch_of(101), std::out_of_range);
    EpochSchedule cu = EpochSchedule::custom({5, 20});
    CHECK(cu.epoch_of(20) == 2);
    CHECK_THROWS_AS(cu.epoch_of(21), std::out_of_range);
    CHECK_THROWS_AS(cu.boundary(3), std::out_of_range);
}

TEST_CASE("custom schedules validate strict monotonicity") {
    EpochSchedule s = EpochSchedule::custom({3, 10, 50});
    CHECK(s.kind() == EpochSchedule::Kind::custom);
    CHECK(s.num_epochs() == 3);
    CHECK(s.boundary(2) == 10);
    CHECK(s.epoch_of(1) == 1);
    CHECK(s.epoch_of(3) == 1);
    CHECK(s.epoch_of(4) == 2);
    CHECK(s.epoch_of(50) == 3);
    CHECK(s.boundaries_up_to(40) == std::vector<long>{3, 10, 50});

    CHECK_THROWS_AS(EpochSchedule::custom({}), std::invalid_argument);
    CHECK_THROWS_AS(EpochSchedule::custom({0, 5}), std::invalid_argument);
    CHECK_THROWS_AS(EpochSchedule::custom({5, 5, 10}), std::invalid_argument);
    CHECK_THROWS_AS(EpochSchedule::custom({5, 4}), std::invalid_argument);
    CHECK_THROWS_AS(EpochSchedule::custom({-2, 4}), std::invalid_argument);
}

TEST_CASE("doubling growth condition tau_m >= 2^m") {
    CHECK(EpochSchedule::geometric().doubling_lower_bounded(1000000));
    CHECK(EpochSchedule::custom({2, 4, 8, 100}).doubling_lower_bounded(100));
    CHECK(EpochSchedule::custom({3, 9, 27}).doubling_lower_bounded(27));
    CHECK_FALSE(EpochSchedule::custom({1, 4, 8}).doubling_lower_bounded(8));
    CHECK_FALSE(EpochSchedule::custom({2, 3, 8}).doubling_lower_bounded(8));

    SUBCASE("known-horizon T=100 eventually grows too slowly") {
        // tau_7 = 97 < 2^7 = 128, so the condition fails once that epoch is reached.
        EpochSchedule s = EpochSchedule::known_horizon(100);
        CHECK(s.doubling_lower_bounded(32));   // epochs 1..2: 10 >= 2, 32 >= 4
        CHECK_FALSE(s.doubling_lower_bounded(100));
    }
}

}  // TEST_SUITE("schedule")
