#pragma once

// Offline regression oracles and estimation-error curves.
//
// An oracle consumes logged (context, action, reward) samples and returns a
// predictor minimizing empirical squared error over its model class:
//   - erm_least_squares: exact minimizer over an explicit finite class;
//   - linear_least_squares: ridge-regularized least squares over linear
//     functions of action features.
//
// An EstimationErrorCurve xi(n, delta) upper-bounds the oracle's expected
// squared estimation error after n samples, at confidence 1 - delta; the
// adaptive learning-rate algorithm variant consumes it directly.

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "falcon/core.hpp"

namespace falcon {

// One supervised sample for a finite-class oracle.
struct Sample {
    int context = 0;
    int action = 0;
    double reward = 0.0;
};

// One supervised sample for the linear oracle: features of the chosen action.
struct LinearSample {
    std::vector<double> features;
    double reward = 0.0;
};

// Exact empirical-risk minimizer over the finite class: returns the member
// minimizing sum of squared errors on `data`. Ties within 1e-12 of the
// minimum resolve to the smallest member index; empty data returns member 0.
std::shared_ptr<const TablePredictor> erm_least_squares(const FiniteFunctionClass& cls,
                                                        std::span<const Sample> data);

// Index-returning variant of erm_least_squares.
int erm_least_squares_index(const FiniteFunctionClass& cls, std::span<const Sample> data);

// Ridge least squares: solves (sum phi phi^T + ridge * I) theta = sum phi r.
// Empty data yields theta = 0. Predictions are clamped to [0, 1] at eval time
// with a clamp-event counter on the returned predictor.
std::shared_ptr<const LinearPredictor> linear_least_squares(int dimension, double ridge,
                                                            std::span<const LinearSample> data);

inline constexpr double kDefaultRidge = 1e-8;

// Estimation-error curve: n >= 1 samples, failure probability delta in (0, 1].
struct EstimationErrorCurve {
    std::function<double(long n, double delta)> xi;
    std::string descriptor;  // echoed into configs/outputs

    double operator()(long n, double delta) const;
};

// xi(n, delta) = C * ln(2 |F| / delta) / n for a finite class of size |F|.
EstimationErrorCurve xi_finite_class(long class_size, double constant = 16.0);

// xi(n, delta) = C * (d * ln(e * max(n, d) / d) + ln(2 / delta)) / n for
// d-dimensional linear classes.
EstimationErrorCurve xi_linear_class(int dimension, double constant = 8.0);

// Constant curve, for tests and calibration.
EstimationErrorCurve xi_constant(double value);

// Oracle interface used by the learners: fit a predictor to logged rounds.
class RegressionOracle {
public:
    virtual ~RegressionOracle() = default;
    virtual std::shared_ptr<const Predictor> fit(
        std::span<const InteractionRecord> records) const = 0;
};

class FiniteClassErmOracle final : public RegressionOracle {
public:
    explicit FiniteClassErmOracle(FiniteFunctionClass cls) : class_(std::move(cls)) {}
    std::shared_ptr<const Predictor> fit(
        std::span<const InteractionRecord> records) const override;
    const FiniteFunctionClass& function_class() const { return class_; }

private:
    FiniteFunctionClass class_;
};

class LinearRidgeOracle final : public RegressionOracle {
public:
    LinearRidgeOracle(int dimension, double ridge = kDefaultRidge);
    std::shared_ptr<const Predictor> fit(
        std::span<const InteractionRecord> records) const override;
    int dimension() const { return dimension_; }
    double ridge() const { return ridge_; }

private:
    int dimension_;
    double ridge_;
};

}  // namespace falcon
