/**
 * @file policy.hpp
 * @brief Conditional decision distributions: masked log-softmax over the
 *        candidates of a state, rollouts, sequence log-probabilities,
 *        a trainable featurized softmax policy with analytic gradients,
 *        and Top-p (nucleus) filtering.
 */

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "rebeam/core.hpp"

namespace rebeam {

/// Masked log-distribution over the candidates of one state.
/// Infeasible candidates are exactly -infinity; the finite entries
/// exponentiate and sum to 1.
struct PolicyOutput {
    std::vector<double> logProbs;

    int size() const { return static_cast<int>(logProbs.size()); }
};

/// A policy assigns a raw logit to every candidate of a state.
template <typename P, typename E>
concept PolicyFor = Environment<E> &&
    requires(const P& p, const E& env, const typename E::State& s, DecisionIndex a) {
        { p.logit(env, s, a) } -> std::convertible_to<double>;
    };

/**
 * @brief Masked conditional distribution pi(.|state).
 *
 * Logits are divided by the temperature, infeasible candidates are set to
 * -infinity, and the rest is normalized via a max-shifted log-softmax.
 * A terminal state (or one with no feasible candidate) is a contract
 * violation.
 */
template <Environment E, PolicyFor<E> P>
PolicyOutput conditional(const E& env, const P& policy, const typename E::State& state,
                         double temperature = 1.0) {
    const int width = env.branching(state);
    std::vector<std::uint8_t> mask;
    env.feasibleMask(state, mask);

    PolicyOutput out;
    out.logProbs.assign(static_cast<std::size_t>(width), kNegInf);
    double maxLogit = kNegInf;
    for (int a = 0; a < width; ++a) {
        if (!mask[static_cast<std::size_t>(a)]) continue;
        const double z = policy.logit(env, state, a) / temperature;
        out.logProbs[static_cast<std::size_t>(a)] = z;
        maxLogit = std::max(maxLogit, z);
    }
    if (maxLogit == kNegInf)
        throw ContractViolation("conditional: no feasible candidate at this state");
    double sum = 0.0;
    for (int a = 0; a < width; ++a) {
        const double z = out.logProbs[static_cast<std::size_t>(a)];
        if (z != kNegInf) sum += std::exp(z - maxLogit);
    }
    const double logZ = maxLogit + std::log(sum);
    for (int a = 0; a < width; ++a) {
        double& z = out.logProbs[static_cast<std::size_t>(a)];
        if (z != kNegInf) z -= logZ;
    }
    return out;
}

/// Greedy argmax over a PolicyOutput; ties break to the lowest index.
inline DecisionIndex argmaxDecision(const PolicyOutput& out) {
    int best = -1;
    double bestLog = kNegInf;
    for (int a = 0; a < out.size(); ++a) {
        const double z = out.logProbs[static_cast<std::size_t>(a)];
        if (z != kNegInf && z > bestLog) {
            bestLog = z;
            best = a;
        }
    }
    if (best < 0) throw ContractViolation("argmaxDecision: empty distribution");
    return best;
}

/// One draw from a PolicyOutput.
inline DecisionIndex sampleDecision(const PolicyOutput& out, RngStream& rng) {
    const double u = rng.uniform01();
    double cum = 0.0;
    int last = -1;
    for (int a = 0; a < out.size(); ++a) {
        const double z = out.logProbs[static_cast<std::size_t>(a)];
        if (z == kNegInf) continue;
        cum += std::exp(z);
        last = a;
        if (u <= cum) return a;
    }
    if (last < 0) throw ContractViolation("sampleDecision: empty distribution");
    return last;  // rounding left cum slightly below 1
}

enum class RolloutMode { Greedy, Sample };

/**
 * @brief Decode one complete solution from the policy.
 *
 * Greedy mode picks the stepwise argmax (ties to the lowest index) and is
 * deterministic; sample mode draws each decision from the conditional.
 * A dead end raises InfeasibleError carrying the partial sequence.
 */
template <Environment E, PolicyFor<E> P>
Solution rollout(const E& env, const P& policy, RolloutMode mode, RngStream& rng,
                 double temperature = 1.0) {
    const int n = env.solutionLength();
    typename E::State state = env.initialState();
    Solution solution;
    solution.decisions.reserve(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        PolicyOutput out;
        try {
            out = conditional(env, policy, state, temperature);
        } catch (const ContractViolation&) {
            throw InfeasibleError("rollout: dead end with no feasible decision",
                                  solution.decisions);
        }
        const DecisionIndex a =
            mode == RolloutMode::Greedy ? argmaxDecision(out) : sampleDecision(out, rng);
        solution.decisions.push_back(a);
        state = env.applyDecision(state, a);
    }
    solution.objective = env.terminalObjective(state);
    return solution;
}

/**
 * @brief Total log-probability of a complete solution under the policy:
 *        the sum of stepwise conditional log-probabilities. A sequence that
 *        traverses a masked decision scores -infinity.
 */
template <Environment E, PolicyFor<E> P>
double totalLogProb(const E& env, const P& policy, std::span<const DecisionIndex> decisions,
                    double temperature = 1.0) {
    typename E::State state = env.initialState();
    std::vector<std::uint8_t> mask;
    double total = 0.0;
    for (DecisionIndex a : decisions) {
        const int width = env.branching(state);
        if (a < 0 || a >= width) return kNegInf;
        env.feasibleMask(state, mask);
        if (!mask[static_cast<std::size_t>(a)]) return kNegInf;
        const PolicyOutput out = conditional(env, policy, state, temperature);
        total += out.logProbs[static_cast<std::size_t>(a)];
        state = env.applyDecision(state, a);
    }
    return total;
}

namespace detail {

/// Nucleus selection over (index, prob) pairs: smallest probability-sorted
/// prefix with cumulative mass >= p. Ties between equal probabilities keep
/// the lower index first. At least one candidate always survives.
inline std::vector<int> nucleusKeep(std::span<const double> probs, double p) {
    std::vector<int> order;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i)
        if (probs[static_cast<std::size_t>(i)] > 0.0) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
    });
    std::vector<int> kept;
    double cum = 0.0;
    for (int idx : order) {
        kept.push_back(idx);
        cum += probs[static_cast<std::size_t>(idx)];
        if (cum >= p) break;
    }
    return kept;
}

} // namespace detail

/**
 * @brief Top-p (nucleus) filter: keep the smallest probability-sorted prefix
 *        with cumulative mass >= p, renormalize, and mask the rest.
 *        p = 1 keeps every candidate and is an exact identity.
 */
inline PolicyOutput topPFilter(const PolicyOutput& out, double p) {
    if (p <= 0.0 || p > 1.0) throw ContractViolation("topPFilter: p must be in (0, 1]");
    std::vector<double> probs(out.logProbs.size(), 0.0);
    int finite = 0;
    for (std::size_t i = 0; i < out.logProbs.size(); ++i) {
        if (out.logProbs[i] != kNegInf) {
            probs[i] = std::exp(out.logProbs[i]);
            ++finite;
        }
    }
    const std::vector<int> kept = detail::nucleusKeep(probs, p);
    if (static_cast<int>(kept.size()) == finite) return out;  // kept everything

    PolicyOutput filtered;
    filtered.logProbs.assign(out.logProbs.size(), kNegInf);
    double keptMass = 0.0;
    for (int idx : kept) keptMass += probs[static_cast<std::size_t>(idx)];
    const double logKept = std::log(keptMass);
    for (int idx : kept)
        filtered.logProbs[static_cast<std::size_t>(idx)] =
            out.logProbs[static_cast<std::size_t>(idx)] - logKept;
    return filtered;
}

/// Policy with equal probability on every feasible candidate.
class UniformPolicy {
public:
    template <Environment E>
    double logit(const E&, const typename E::State&, DecisionIndex) const {
        return 0.0;
    }
};

/// Deterministic policy encoding one fixed sequence: the encoded decision
/// gets probability 1 at its depth, every other candidate probability 0.
class SequencePolicy {
public:
    explicit SequencePolicy(std::vector<DecisionIndex> decisions)
        : decisions_(std::move(decisions)) {}

    template <Environment E>
    double logit(const E& env, const typename E::State& state, DecisionIndex a) const {
        const int depth = depthOf(env, state);
        return decisions_[static_cast<std::size_t>(depth)] == a ? 0.0 : kNegInf;
    }

private:
    template <Environment E>
    static int depthOf(const E& env, const typename E::State& s) {
        if constexpr (requires { { env.nodeDepth(s) } -> std::convertible_to<int>; }) {
            return env.nodeDepth(s);
        } else if constexpr (requires { { s.count } -> std::convertible_to<int>; }) {
            return s.count;
        } else if constexpr (requires { { s.scheduled } -> std::convertible_to<int>; }) {
            return s.scheduled;
        } else {
            static_assert(sizeof(E) == 0, "SequencePolicy needs a depth-bearing state");
            return 0;
        }
    }

    std::vector<DecisionIndex> decisions_;
};

/**
 * @brief Linear softmax policy: logit(state, a) = theta . phi(state, a).
 *
 * The feature map is a small struct with `dim`, an `id()` string for
 * checkpoint compatibility checks, and
 * `void operator()(const E&, const State&, DecisionIndex, std::span<double>)`.
 */
template <typename FeatureMap>
class FeaturizedSoftmaxPolicy {
public:
    using Features = FeatureMap;

    FeaturizedSoftmaxPolicy() : theta_(FeatureMap::dim, 0.0) {}

    explicit FeaturizedSoftmaxPolicy(std::vector<double> theta) : theta_(std::move(theta)) {
        if (static_cast<int>(theta_.size()) != FeatureMap::dim)
            throw ContractViolation("FeaturizedSoftmaxPolicy: theta dimension mismatch");
    }

    template <Environment E>
    double logit(const E& env, const typename E::State& state, DecisionIndex a) const {
        double phi[FeatureMap::dim];
        FeatureMap{}(env, state, a, std::span<double>(phi, FeatureMap::dim));
        double z = 0.0;
        for (int f = 0; f < FeatureMap::dim; ++f) z += theta_[static_cast<std::size_t>(f)] * phi[f];
        return z;
    }

    template <Environment E>
    void features(const E& env, const typename E::State& state, DecisionIndex a,
                  std::span<double> out) const {
        FeatureMap{}(env, state, a, out);
    }

    const std::vector<double>& theta() const { return theta_; }
    std::vector<double>& theta() { return theta_; }

    static constexpr int dim() { return FeatureMap::dim; }
    static const char* featureMapId() { return FeatureMap::id(); }

private:
    std::vector<double> theta_;
};

/// One supervised example: the environment, a labeled solution, and the
/// prefix cut depth after which the next decision is the target.
template <Environment E>
struct LabeledCut {
    const E* env;
    const Solution* label;
    int cutDepth;
};

/**
 * @brief Batch cross-entropy loss and analytic gradient for a featurized
 *        softmax policy.
 *
 * Loss is the mean negative log-likelihood of each labeled next decision;
 * the per-example gradient is sum_a p(a) phi(a) - phi(a*).
 */
template <typename FeatureMap, Environment E>
std::pair<double, std::vector<double>> lossAndGradient(
    const FeaturizedSoftmaxPolicy<FeatureMap>& policy, std::span<const LabeledCut<E>> batch) {
    constexpr int F = FeatureMap::dim;
    double loss = 0.0;
    std::vector<double> grad(static_cast<std::size_t>(F), 0.0);
    if (batch.empty()) return {loss, grad};

    std::vector<std::uint8_t> mask;
    std::vector<double> logits;
    std::vector<std::vector<double>> phis;
    for (const LabeledCut<E>& item : batch) {
        const E& env = *item.env;
        const int n = env.solutionLength();
        if (item.cutDepth < 0 || item.cutDepth >= n)
            throw ContractViolation("lossAndGradient: cut depth out of range");
        typename E::State state = replayState(
            env, std::span<const DecisionIndex>(item.label->decisions).first(
                     static_cast<std::size_t>(item.cutDepth)));
        const DecisionIndex target = item.label->decisions[static_cast<std::size_t>(item.cutDepth)];
        const int width = env.branching(state);
        env.feasibleMask(state, mask);
        if (target < 0 || target >= width || !mask[static_cast<std::size_t>(target)])
            throw ContractViolation("lossAndGradient: labeled decision is masked");

        logits.assign(static_cast<std::size_t>(width), kNegInf);
        phis.assign(static_cast<std::size_t>(width), {});
        double maxLogit = kNegInf;
        for (int a = 0; a < width; ++a) {
            if (!mask[static_cast<std::size_t>(a)]) continue;
            auto& phi = phis[static_cast<std::size_t>(a)];
            phi.assign(static_cast<std::size_t>(F), 0.0);
            policy.features(env, state, a, phi);
            double z = 0.0;
            for (int f = 0; f < F; ++f)
                z += policy.theta()[static_cast<std::size_t>(f)] * phi[static_cast<std::size_t>(f)];
            logits[static_cast<std::size_t>(a)] = z;
            maxLogit = std::max(maxLogit, z);
        }
        double sum = 0.0;
        for (int a = 0; a < width; ++a)
            if (logits[static_cast<std::size_t>(a)] != kNegInf)
                sum += std::exp(logits[static_cast<std::size_t>(a)] - maxLogit);
        const double logZ = maxLogit + std::log(sum);

        loss += logZ - logits[static_cast<std::size_t>(target)];
        for (int a = 0; a < width; ++a) {
            if (logits[static_cast<std::size_t>(a)] == kNegInf) continue;
            const double prob = std::exp(logits[static_cast<std::size_t>(a)] - logZ);
            for (int f = 0; f < F; ++f)
                grad[static_cast<std::size_t>(f)] += prob * phis[static_cast<std::size_t>(a)][static_cast<std::size_t>(f)];
        }
        for (int f = 0; f < F; ++f)
            grad[static_cast<std::size_t>(f)] -= phis[static_cast<std::size_t>(target)][static_cast<std::size_t>(f)];
    }
    const double invB = 1.0 / static_cast<double>(batch.size());
    loss *= invB;
    for (double& g : grad) g *= invB;
    return {loss, grad};
}

} // namespace rebeam
