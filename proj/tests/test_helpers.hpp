/**
 * @file test_helpers.hpp
 * @brief Shared test-side oracles: exhaustive leaf enumeration of synthetic
 *        trees, brute-force sampling-without-replacement laws, and
 *        total-variation distance.
 */

#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "rebeam/policy.hpp"
#include "rebeam/synthetic.hpp"
#include "rebeam/tree.hpp"

namespace rebeam::testing {

/// Expand every node of an environment's full decision tree into the search
/// tree (exponential; only for desk-scale environments).
template <typename E, typename P>
void expandFully(SearchTree& tree, SearchTree::Node& node, const E& env,
                 typename E::State state, const P& policy) {
    if (node.depth == env.solutionLength()) return;
    tree.expand(node, conditional(env, policy, state));
    for (std::size_t a = 0; a < node.children.size(); ++a) {
        if (!node.children[a]) continue;
        expandFully(tree, *node.children[a], env,
                    env.applyDecision(state, static_cast<DecisionIndex>(a)), policy);
    }
}

/// Central finite-difference gradient of the batch loss w.r.t. theta.
template <typename FeatureMap, typename E>
std::vector<double> finiteDifferenceGradient(FeaturizedSoftmaxPolicy<FeatureMap> policy,
                                             const std::vector<LabeledCut<E>>& batch,
                                             double step = 1e-5) {
    std::vector<double> grad(FeatureMap::dim, 0.0);
    for (int f = 0; f < FeatureMap::dim; ++f) {
        const double saved = policy.theta()[static_cast<std::size_t>(f)];
        policy.theta()[static_cast<std::size_t>(f)] = saved + step;
        const double up = lossAndGradient(policy, std::span<const LabeledCut<E>>(batch)).first;
        policy.theta()[static_cast<std::size_t>(f)] = saved - step;
        const double down = lossAndGradient(policy, std::span<const LabeledCut<E>>(batch)).first;
        policy.theta()[static_cast<std::size_t>(f)] = saved;
        grad[static_cast<std::size_t>(f)] = (up - down) / (2.0 * step);
    }
    return grad;
}

/**
 * @brief Worst per-component relative error between two gradients.
 *
 * The denominator is floored at 1e-6: central differences at step 1e-5 carry
 * ~1e-11 of absolute cancellation noise, so components below the floor are
 * compared absolutely (noise maps to ~1e-5 relative, a genuine error to ~1).
 */
inline double maxRelativeError(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

struct EnumeratedLeaf {
    std::vector<DecisionIndex> decisions;
    double prob = 0.0;       ///< probability of the full path from the root
    double objective = 0.0;
};

/// Every leaf of a synthetic tree with its exact path probability.
inline std::vector<EnumeratedLeaf> enumerateLeaves(const SyntheticTreeEnv& env) {
    std::vector<EnumeratedLeaf> leaves;
    std::vector<DecisionIndex> prefix;
    std::function<void(int, double)> walk = [&](int node, double prob) {
        const auto& entry = env.nodes()[static_cast<std::size_t>(node)];
        if (entry.children.empty()) {
            leaves.push_back({prefix, prob, entry.leafObjective});
            return;
        }
        for (std::size_t c = 0; c < entry.children.size(); ++c) {
            prefix.push_back(static_cast<DecisionIndex>(c));
            walk(entry.children[c], prob * entry.childProb[c]);
            prefix.pop_back();
        }
    };
    walk(0, 1.0);
    return leaves;
}

/**
 * @brief Exact per-leaf inclusion probabilities of sequential sampling
 *        without replacement: draw k distinct leaves, each draw from the
 *        remaining leaves renormalized.
 *
 * Enumerates every ordered k-tuple; practical for ~12 leaves, k <= 4.
 */
inline std::vector<double> bruteForceWorInclusion(const std::vector<double>& probs, int k) {
    const int m = static_cast<int>(probs.size());
    std::vector<double> inclusion(static_cast<std::size_t>(m), 0.0);
    std::vector<int> chosen;
    std::vector<bool> used(static_cast<std::size_t>(m), false);
    std::function<void(double, double)> walk = [&](double tupleProb, double remainingMass) {
        if (static_cast<int>(chosen.size()) == k) {
            for (int idx : chosen) inclusion[static_cast<std::size_t>(idx)] += tupleProb;
            return;
        }
        for (int i = 0; i < m; ++i) {
            if (used[static_cast<std::size_t>(i)]) continue;
            const double p = probs[static_cast<std::size_t>(i)];
            if (p <= 0.0) continue;
            used[static_cast<std::size_t>(i)] = true;
            chosen.push_back(i);
            walk(tupleProb * p / remainingMass, remainingMass - p);
            chosen.pop_back();
            used[static_cast<std::size_t>(i)] = false;
        }
    };
    walk(1.0, 1.0);
    return inclusion;
}

/// Total-variation distance between two finite distributions (or any two
/// equal-length nonnegative vectors): half the L1 difference.
inline double totalVariation(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return 0.5 * sum;
}

/// Key for identifying a complete decision sequence in maps.
inline std::string sequenceKey(const std::vector<DecisionIndex>& decisions) {
    std::string key;
    for (DecisionIndex a : decisions) {
        key += std::to_string(a);
        key += ',';
    }
    return key;
}

} // namespace rebeam::testing
