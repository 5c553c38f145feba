/**
 * @file decode.hpp
 * @brief Round-based sequence decoding: sample k alternatives without
 *        replacement, keep the best as incumbent, commit s of its decisions,
 *        subtract the sampled sequences that share the committed prefix, and
 *        continue from the deeper root until a full-length solution stands.
 *        Also the node-transition budget arithmetic used for equal-budget
 *        baseline comparisons.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rebeam/sbs.hpp"

namespace rebeam {

struct DecodeConfig {
    int k = 16;                ///< beam width per round
    int s = 1;                 ///< decisions committed per round (1..n; clamped to n)
    double topP = 1.0;         ///< nucleus filter on each expansion (1 = off)
    double temperature = 1.0;  ///< conditional temperature, frozen into the tree
    std::uint64_t seed = 0;    ///< RNG seed when no external stream is supplied
    bool countTransitions = true;  ///< accumulate budget counters
    bool recordRounds = true;      ///< keep per-round traces
    bool recordSamples = false;    ///< keep every round's sampled sequences
};

struct DecodeResult {
    Solution best;
    int roundsExecuted = 0;
    /// Idealized node transitions: per round, leaves returned x depth
    /// remaining below the round's root. Matches transitionBudget(k, s, n)
    /// whenever no round exhausts its subtree.
    std::uint64_t transitionsUsed = 0;
    /// Beam advancements actually performed (narrower near the root).
    std::uint64_t rawTransitions = 0;
    std::vector<double> perRoundBest;      ///< incumbent objective after each round
    std::vector<int> perRoundRootDepth;    ///< root depth at the start of each round
    std::vector<std::vector<SampledLeaf>> samples;  ///< when recordSamples
};

/**
 * @brief Total node transitions g(k, s) of a full decode on sequences of
 *        length l: k per level, summed over rounds whose roots sit at depths
 *        0, s, 2s, ... The closed form k * (t*l - s*t*(t-1)/2) with
 *        t = ceil(l/s) is exactly integral because t*(t-1) is even.
 */
inline std::uint64_t transitionBudget(int k, int s, int l) {
    if (k < 1 || s < 1 || l < 1 || s > l)
        throw ContractViolation("transitionBudget: need k,s,l >= 1 and s <= l");
    const std::uint64_t rounds = (static_cast<std::uint64_t>(l) + s - 1) / s;
    const std::uint64_t levels =
        rounds * static_cast<std::uint64_t>(l) - static_cast<std::uint64_t>(s) * (rounds * (rounds - 1) / 2);
    return static_cast<std::uint64_t>(k) * levels;
}

/// Budget relative to one plain k-wide sampling round: h(s) = g(k,s)/(k*l).
inline double budgetMultiplier(int k, int s, int l) {
    return static_cast<double>(transitionBudget(k, s, l)) /
           (static_cast<double>(k) * static_cast<double>(l));
}

/// Sequences a single-round sampler may draw under the same budget: k
/// times h(s) rounded up, computed exactly in integers.
inline std::uint64_t equalizedSampleCount(int k, int s, int l) {
    const std::uint64_t g = transitionBudget(k, s, l);
    const std::uint64_t perRound = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(l);
    return static_cast<std::uint64_t>(k) * ((g + perRound - 1) / perRound);
}

/**
 * @brief Decode one instance with the step-and-reconsider loop.
 *
 * Per round: sample up to k complete sequences without replacement from the
 * current root; adopt the best strictly-improving sample as incumbent (ties
 * keep the incumbent, then the earliest sample); advance the commit depth t
 * by s (clamped to n); subtract every sample sharing the incumbent's first t
 * decisions from the tree's masses at depths >= t; shift the root to the
 * incumbent's length-t prefix. Rounds where the subtree is exhausted still
 * advance t, so the loop always terminates.
 */
template <Environment E, PolicyFor<E> P>
DecodeResult decode(const E& env, const P& policy, const DecodeConfig& config, RngStream& rng) {
    const int n = env.solutionLength();
    if (config.k < 1 || config.s < 1)
        throw ContractViolation("decode: k and s must be >= 1");

    SearchTree tree;
    const SbsOptions options{config.topP, config.temperature, false};
    DecodeResult result;
    int t = 0;

    while (t < n) {
        const int roundStartDepth = tree.rootDepth();
        const std::uint64_t rawBefore = tree.transitionCount();
        std::vector<SampledLeaf> sampled = sbsSample(tree, env, policy, config.k, rng, options);
        if (config.countTransitions) {
            result.transitionsUsed +=
                sampled.size() * static_cast<std::uint64_t>(n - roundStartDepth);
            result.rawTransitions += tree.transitionCount() - rawBefore;
        }
        if (sampled.empty() && !result.best.feasible())
            throw ContractViolation("decode: first round produced no sequence");

        for (const SampledLeaf& leaf : sampled) {
            if (leaf.objective > result.best.objective) {
                result.best.decisions = leaf.decisions;
                result.best.objective = leaf.objective;
            }
        }

        t = std::min(t + config.s, n);

        for (const SampledLeaf& leaf : sampled) {
            if (std::equal(leaf.decisions.begin(), leaf.decisions.begin() + t,
                           result.best.decisions.begin()))
                tree.markSampled(leaf.decisions, leaf.logPi, t);
        }
        if (t < n)
            tree.shiftRoot(
                std::span<const DecisionIndex>(result.best.decisions).first(static_cast<std::size_t>(t)));

        ++result.roundsExecuted;
        if (config.recordRounds) {
            result.perRoundBest.push_back(result.best.objective);
            result.perRoundRootDepth.push_back(roundStartDepth);
        }
        if (config.recordSamples) result.samples.push_back(std::move(sampled));
    }
    return result;
}

/// Decode with a stream seeded from the config.
template <Environment E, PolicyFor<E> P>
DecodeResult decode(const E& env, const P& policy, const DecodeConfig& config) {
    RngStream rng(config.seed);
    return decode(env, policy, config, rng);
}

} // namespace rebeam
