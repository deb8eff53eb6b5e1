#include "falcon/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace falcon {

int erm_least_squares_index(const FiniteFunctionClass& cls, std::span<const Sample> data) {
    if (data.empty()) return 0;
    std::vector<double> losses(static_cast<std::size_t>(cls.size()), 0.0);
    for (const Sample& s : data) {
        if (!(s.reward >= 0.0 && s.reward <= 1.0))
            throw std::invalid_argument("erm_least_squares: reward outside [0, 1]");
        for (int i = 0; i < cls.size(); ++i) {
            const double e = cls.value(i, s.context, s.action) - s.reward;
            losses[static_cast<std::size_t>(i)] += e * e;
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (double l : losses) best = std::min(best, l);
    // Exact ties (difference below 1e-12) resolve to the smallest index.
    for (int i = 0; i < cls.size(); ++i) {
        if (losses[static_cast<std::size_t>(i)] <= best + kEqualityTol) return i;
    }
    return 0;  // unreachable
}

std::shared_ptr<const TablePredictor> erm_least_squares(const FiniteFunctionClass& cls,
                                                        std::span<const Sample> data) {
    return cls.member(erm_least_squares_index(cls, data));
}

std::shared_ptr<const LinearPredictor> linear_least_squares(int dimension, double ridge,
                                                            std::span<const LinearSample> data) {
    if (dimension <= 0) throw std::invalid_argument("linear_least_squares: dimension must be > 0");
    if (!(ridge > 0.0)) throw std::invalid_argument("linear_least_squares: ridge must be > 0");
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dimension, dimension);
    Eigen::VectorXd moment = Eigen::VectorXd::Zero(dimension);
    Eigen::VectorXd phi(dimension);
    for (const LinearSample& s : data) {
        if (static_cast<int>(s.features.size()) != dimension)
            throw std::invalid_argument("linear_least_squares: feature dimension mismatch");
        for (int i = 0; i < dimension; ++i) phi(i) = s.features[static_cast<std::size_t>(i)];
        gram.noalias() += phi * phi.transpose();
        moment.noalias() += phi * s.reward;
    }
    gram.diagonal().array() += ridge;
    const Eigen::VectorXd theta = gram.llt().solve(moment);
    std::vector<double> out(static_cast<std::size_t>(dimension));
    for (int i = 0; i < dimension; ++i) out[static_cast<std::size_t>(i)] = theta(i);
    return std::make_shared<LinearPredictor>(std::move(out));
}

double EstimationErrorCurve::operator()(long n, double delta) const {
    if (n < 1) throw std::invalid_argument("estimation-error curve queried with n < 1");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("estimation-error curve: delta must lie in (0, 1]");
    const double v = xi(n, delta);
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("estimation-error curve returned a non-positive value");
    return v;
}

EstimationErrorCurve xi_finite_class(long class_size, double constant) {
    if (class_size < 1) throw std::invalid_argument("xi_finite_class: class size must be >= 1");
    if (!(constant > 0.0)) throw std::invalid_argument("xi_finite_class: constant must be > 0");
    EstimationErrorCurve c;
    c.xi = [class_size, constant](long n, double delta) {
        return constant * std::log(2.0 * static_cast<double>(class_size) / delta) /
               static_cast<double>(n);
    };
    c.descriptor = "finite(size=" + std::to_string(class_size) +
                   ",c=" + std::to_string(constant) + ")";
    return c;
}

EstimationErrorCurve xi_linear_class(int dimension, double constant) {
    if (dimension < 1) throw std::invalid_argument("xi_linear_class: dimension must be >= 1");
    if (!(constant > 0.0)) throw std::invalid_argument("xi_linear_class: constant must be > 0");
    EstimationErrorCurve c;
    const double d = static_cast<double>(dimension);
    c.xi = [d, constant](long n, double delta) {
        const double nn = std::max(static_cast<double>(n), d);
        const double complexity = d * std::log(std::exp(1.0) * nn / d) + std::log(2.0 / delta);
        return constant * complexity / static_cast<double>(n);
    };
    c.descriptor = "linear(d=" + std::to_string(dimension) +
                   ",c=" + std::to_string(constant) + ")";
    return c;
}

EstimationErrorCurve xi_constant(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("xi_constant: value must be > 0");
    EstimationErrorCurve c;
    c.xi = [value](long, double) { return value; };
    c.descriptor = "constant(" + std::to_string(value) + ")";
    return c;
}

std::shared_ptr<const Predictor> FiniteClassErmOracle::fit(
    std::span<const InteractionRecord> records) const {
    std::vector<Sample> samples;
    samples.reserve(records.size());
    for (const auto& r : records)
        samples.push_back(Sample{r.context.index, r.action, r.reward});
    return erm_least_squares(class_, samples);
}

LinearRidgeOracle::LinearRidgeOracle(int dimension, double ridge)
    : dimension_(dimension), ridge_(ridge) {
    if (dimension_ <= 0) throw std::invalid_argument("LinearRidgeOracle: dimension must be > 0");
    if (!(ridge_ > 0.0)) throw std::invalid_argument("LinearRidgeOracle: ridge must be > 0");
}

std::shared_ptr<const Predictor> LinearRidgeOracle::fit(
    std::span<const InteractionRecord> records) const {
    std::vector<LinearSample> samples;
    samples.reserve(records.size());
    for (const auto& r : records) {
        if (r.action < 0 || r.action >= static_cast<int>(r.context.action_features.size()))
            throw std::invalid_argument("LinearRidgeOracle: record lacks chosen-action features");
        samples.push_back(
            LinearSample{r.context.action_features[static_cast<std::size_t>(r.action)], r.reward});
    }
    return linear_least_squares(dimension_, ridge_, samples);
}

}  // namespace falcon
