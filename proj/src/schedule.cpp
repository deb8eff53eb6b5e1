#include "falcon/schedule.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace falcon {

namespace {

// Smallest m >= 1 with t <= 2^m.
int geometric_epoch_of(long t) {
    if (t < 1) throw std::invalid_argument("epoch_of: rounds are 1-based");
    const auto u = static_cast<unsigned long long>(t - 1);
    const int m = std::bit_width(u);  // ceil(log2(t)) for t >= 2, 0 for t = 1
    return std::max(1, m);
}

long pow2_boundary(int m) {
    if (m < 0) throw std::invalid_argument("boundary: epoch index must be >= 0");
    if (m >= 62) throw std::out_of_range("boundary: geometric schedule index too large");
    return 1L << m;
}

}  // namespace

EpochSchedule EpochSchedule::geometric() { return EpochSchedule(Kind::geometric); }

EpochSchedule EpochSchedule::known_horizon(long horizon) {
    if (horizon < 2) throw std::invalid_argument("known_horizon: horizon must be at least 2");
    EpochSchedule s(Kind::known_horizon);
    const double T = static_cast<double>(horizon);
    for (int m = 1;; ++m) {
        // ceil(T^(1 - 2^-m)) with a small downward nudge so values that are
        // mathematically integral do not round up from representation error.
        const double raw = std::pow(T, 1.0 - std::exp2(-m));
        long b = static_cast<long>(std::ceil(raw - 1e-9));
        if (b >= horizon) {
            s.boundaries_.push_back(horizon);
            break;
        }
        if (s.boundaries_.empty() || b > s.boundaries_.back()) s.boundaries_.push_back(b);
        if (m > 400) throw std::runtime_error("known_horizon: schedule failed to reach horizon");
    }
    return s;
}

EpochSchedule EpochSchedule::custom(std::vector<long> boundaries) {
    if (boundaries.empty()) throw std::invalid_argument("custom schedule: no boundaries");
    long prev = 0;
    for (long b : boundaries) {
        if (b <= prev)
            throw std::invalid_argument("custom schedule: boundaries must be strictly increasing");
        prev = b;
    }
    EpochSchedule s(Kind::custom);
    s.boundaries_ = std::move(boundaries);
    return s;
}

long EpochSchedule::boundary(int m) const {
    if (m == 0) return 0;
    if (kind_ == Kind::geometric) return pow2_boundary(m);
    if (m < 0 || m > static_cast<int>(boundaries_.size()))
        throw std::out_of_range("boundary: epoch index " + std::to_string(m) +
                                " beyond schedule");
    return boundaries_[static_cast<std::size_t>(m - 1)];
}

int EpochSchedule::num_epochs() const {
    if (kind_ == Kind::geometric)
        throw std::logic_error("num_epochs: geometric schedule is unbounded");
    return static_cast<int>(boundaries_.size());
}

int EpochSchedule::epoch_of(long t) const {
    if (t < 1) throw std::invalid_argument("epoch_of: rounds are 1-based");
    if (kind_ == Kind::geometric) return geometric_epoch_of(t);
    auto it = std::lower_bound(boundaries_.begin(), boundaries_.end(), t);
    if (it == boundaries_.end())
        throw std::out_of_range("epoch_of: round " + std::to_string(t) +
                                " lies beyond the schedule (schedule exhausted)");
    return static_cast<int>(it - boundaries_.begin()) + 1;
}

bool EpochSchedule::doubling_lower_bounded(long horizon) const {
    const int last = epoch_of(horizon);
    for (int m = 1; m <= last; ++m) {
        if (m >= 62) return false;
        if (boundary(m) < (1L << m)) return false;
    }
    return true;
}

std::vector<long> EpochSchedule::boundaries_up_to(long horizon) const {
    const int last = epoch_of(horizon);
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(last));
    for (int m = 1; m <= last; ++m) out.push_back(boundary(m));
    return out;
}

}  // namespace falcon
