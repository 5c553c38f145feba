/**
 * @file optim.hpp
 * @brief Gradient-step routines for the linear softmax policy: global-norm
 *        clipping plus plain SGD and Adam updates, self-contained.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rebeam/common.hpp"

namespace rebeam {

/// Euclidean norm of a parameter or gradient vector.
inline double globalNorm(std::span<const double> values) {
    double sumSquares = 0.0;
    for (double v : values) sumSquares += v * v;
    return std::sqrt(sumSquares);
}

/**
 * @brief Scale the gradient down so its global norm is at most maxNorm.
 *
 * A non-positive maxNorm disables clipping. Returns the norm before
 * clipping so callers can log it.
 */
inline double clipGlobalNorm(std::vector<double>& gradient, double maxNorm) {
    const double norm = globalNorm(gradient);
    if (maxNorm > 0.0 && norm > maxNorm) {
        const double scale = maxNorm / norm;
        for (double& g : gradient) g *= scale;
    }
    return norm;
}

enum class OptimizerKind { Sgd, Adam };

/**
 * @brief First-order optimizer over a flat parameter vector.
 *
 * Sgd applies theta -= lr * g. Adam keeps exponential first/second moment
 * averages with bias correction and applies the usual update
 * theta -= lr * mHat / (sqrt(vHat) + eps). State is sized lazily on the
 * first step and locked to that dimension afterwards.
 */
class Optimizer {
public:
    explicit Optimizer(OptimizerKind kind = OptimizerKind::Adam, double learningRate = 2e-4,
                       double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
        : kind_(kind), lr_(learningRate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {
        if (learningRate <= 0.0) throw ContractViolation("Optimizer: learning rate must be > 0");
    }

    OptimizerKind kind() const { return kind_; }
    double learningRate() const { return lr_; }
    std::uint64_t stepsTaken() const { return steps_; }

    void step(std::vector<double>& theta, std::span<const double> gradient) {
        if (theta.size() != gradient.size())
            throw ContractViolation("Optimizer::step: parameter/gradient size mismatch");
        if (m_.empty()) {
            m_.assign(theta.size(), 0.0);
            v_.assign(theta.size(), 0.0);
        } else if (m_.size() != theta.size()) {
            throw ContractViolation("Optimizer::step: parameter dimension changed mid-run");
        }
        ++steps_;
        if (kind_ == OptimizerKind::Sgd) {
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr_ * gradient[i];
            return;
        }
        const double biasCorrection1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
        const double biasCorrection2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * gradient[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * gradient[i] * gradient[i];
            const double mHat = m_[i] / biasCorrection1;
            const double vHat = v_[i] / biasCorrection2;
            theta[i] -= lr_ * mHat / (std::sqrt(vHat) + eps_);
        }
    }

private:
    OptimizerKind kind_;
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    std::uint64_t steps_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

} // namespace rebeam
