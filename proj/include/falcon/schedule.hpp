#pragma once

// Epoch schedules 0 = tau_0 < tau_1 < tau_2 < ... controlling when the
// learner refits its predictor. Three kinds:
//   - geometric: tau_m = 2^m, unbounded (boundaries computed lazily);
//   - known-horizon: tau_m = ceil(T^(1 - 2^-m)) with consecutive duplicates
//     removed and the final boundary capped at exactly T;
//   - custom: an explicit strictly increasing boundary list.

#include <optional>
#include <vector>

namespace falcon {

class EpochSchedule {
public:
    enum class Kind { geometric, known_horizon, custom };

    static EpochSchedule geometric();
    static EpochSchedule known_horizon(long horizon);
    static EpochSchedule custom(std::vector<long> boundaries);

    Kind kind() const { return kind_; }
    // True when the boundary list is finite (known-horizon or custom).
    bool finite() const { return kind_ != Kind::geometric; }

    // tau_m for m >= 0 (tau_0 = 0). For finite schedules m must not exceed
    // the last boundary index.
    long boundary(int m) const;

    // Number of boundaries for finite schedules.
    int num_epochs() const;

    // Epoch of round t: the smallest m with t <= tau_m. Throws
    // std::out_of_range when t lies beyond the last boundary of a finite
    // schedule (schedule exhausted).
    int epoch_of(long t) const;

    // Epochs entered by a run of `horizon` rounds, i.e. epoch_of(horizon).
    int epochs_entered(long horizon) const { return epoch_of(horizon); }

    // True when tau_m >= 2^m for every boundary with tau_m <= horizon and for
    // the epoch containing `horizon` itself (growth condition required by the
    // per-epoch-data algorithm variant).
    bool doubling_lower_bounded(long horizon) const;

    // Boundaries up to and including the epoch of `horizon`.
    std::vector<long> boundaries_up_to(long horizon) const;

private:
    explicit EpochSchedule(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::vector<long> boundaries_;  // finite kinds only
};

}  // namespace falcon
