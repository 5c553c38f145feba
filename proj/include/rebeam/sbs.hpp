/**
 * @file sbs.hpp
 * @brief Stochastic Beam Search over the masked search tree.
 *
 * Draws up to k complete sequences without replacement from the residual
 * distribution of the current root by beam search over Gumbel-perturbed
 * total log-probabilities. Each expansion perturbs the children's totals
 * with Gumbel noise conditioned so that the maximum over siblings equals
 * the parent's perturbed score, which makes the top-k leaves an exact
 * without-replacement sample.
 */

#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "rebeam/policy.hpp"
#include "rebeam/tree.hpp"

namespace rebeam {

/// Sampler knobs. topP < 1 trims each expansion's residual distribution to
/// the nucleus before perturbation, for that round only (tree masses are
/// untouched). noiseless zeroes the Gumbel noise and consumes no randomness,
/// turning the sampler into a deterministic beam search.
struct SbsOptions {
    double topP = 1.0;
    double temperature = 1.0;
    bool noiseless = false;
};

/// One complete sequence drawn by the sampler.
struct SampledLeaf {
    std::vector<DecisionIndex> decisions;  ///< absolute, full length
    double logPi = 0.0;       ///< frozen total log-probability of the sequence
    double logPiTilde = 0.0;  ///< cumulative residual log-probability from the current root
    double objective = kNegInf;
    double score = 0.0;  ///< final perturbed score (descending across the result)
};

/**
 * @brief Gumbel scores for the children of one beam entry, conditioned on
 *        the maximum equaling the parent's score.
 *
 * childLogProbs are the children's total (path-cumulative) log-probabilities;
 * entries of -infinity stay -infinity. Draws one standard Gumbel per finite
 * child in index order; with noiseless = true no randomness is consumed.
 * The returned maximum equals parentScore exactly.
 */
inline std::vector<double> conditionedGumbelChildren(double parentScore,
                                                     std::span<const double> childLogProbs,
                                                     RngStream& rng, bool noiseless = false) {
    const std::size_t width = childLogProbs.size();
    std::vector<double> perturbed(width, kNegInf);
    double maxPerturbed = kNegInf;
    for (std::size_t a = 0; a < width; ++a) {
        if (childLogProbs[a] == kNegInf) continue;
        perturbed[a] = childLogProbs[a] + (noiseless ? 0.0 : rng.gumbel());
        maxPerturbed = std::max(maxPerturbed, perturbed[a]);
    }
    if (maxPerturbed == kNegInf)
        throw ContractViolation("conditionedGumbelChildren: no finite child probability");
    for (std::size_t a = 0; a < width; ++a) {
        if (perturbed[a] == kNegInf) continue;
        if (perturbed[a] == maxPerturbed) {
            perturbed[a] = parentScore;
        } else {
            // shifted so max becomes parentScore:
            // score = -log(exp(-parent) - exp(-max) + exp(-g))
            const double tail = -perturbed[a] + log1mExp(perturbed[a] - maxPerturbed);
            perturbed[a] = -logAddExp(-parentScore, tail);
        }
    }
    return perturbed;
}

/**
 * @brief Sample up to k distinct complete sequences from the current root's
 *        residual distribution.
 *
 * Expands nodes on demand (freezing the policy's conditionals on first
 * expansion), perturbs children with conditioned Gumbel noise, and keeps the
 * k best scores per level; ties keep insertion order. Returns fewer than k
 * leaves when the subtree has fewer unsampled sequences left, and an empty
 * list when the root is exhausted. Results are ordered by descending score.
 */
template <Environment E, PolicyFor<E> P>
std::vector<SampledLeaf> sbsSample(SearchTree& tree, const E& env, const P& policy, int k,
                                   RngStream& rng, const SbsOptions& options = {}) {
    if (k < 1) throw ContractViolation("sbsSample: k must be >= 1");
    const int n = env.solutionLength();
    if (tree.rootDepth() >= n)
        throw ContractViolation("sbsSample: root is already a complete sequence");

    struct BeamEntry {
        SearchTree::Node* node;
        typename E::State state;
        double score;        // perturbed total score
        double logPiTilde;   // cumulative residual log-probability from the root
    };
    struct Candidate {
        int parentIndex;
        DecisionIndex decision;
        double score;
        double logPiTilde;
    };

    std::vector<BeamEntry> beam;
    beam.push_back({&tree.root(), replayState(env, tree.rootPartial().decisions), 0.0, 0.0});

    std::vector<double> residual;
    std::vector<Candidate> candidates;
    std::vector<double> childTotals;
    for (int depth = tree.rootDepth(); depth < n; ++depth) {
        candidates.clear();
        for (int b = 0; b < static_cast<int>(beam.size()); ++b) {
            BeamEntry& entry = beam[static_cast<std::size_t>(b)];
            if (!entry.node->expanded)
                tree.expand(*entry.node,
                            conditional(env, policy, entry.state, options.temperature));
            if (!tree.residualDistribution(*entry.node, residual))
                continue;  // fully sampled below; the entry dies this round
            if (options.topP < 1.0) {
                PolicyOutput filtered;
                filtered.logProbs = std::move(residual);
                residual = topPFilter(filtered, options.topP).logProbs;
            }
            childTotals.assign(residual.size(), kNegInf);
            for (std::size_t a = 0; a < residual.size(); ++a)
                if (residual[a] != kNegInf) childTotals[a] = entry.logPiTilde + residual[a];
            const std::vector<double> scores =
                conditionedGumbelChildren(entry.score, childTotals, rng, options.noiseless);
            for (std::size_t a = 0; a < scores.size(); ++a)
                if (scores[a] != kNegInf)
                    candidates.push_back({b, static_cast<DecisionIndex>(a), scores[a],
                                          childTotals[a]});
        }
        if (candidates.empty()) return {};

        if (static_cast<int>(candidates.size()) > k) {
            std::stable_sort(candidates.begin(), candidates.end(),
                             [](const Candidate& x, const Candidate& y) { return x.score > y.score; });
            candidates.resize(static_cast<std::size_t>(k));
        }

        std::vector<BeamEntry> next;
        next.reserve(candidates.size());
        for (const Candidate& c : candidates) {
            const BeamEntry& parent = beam[static_cast<std::size_t>(c.parentIndex)];
            SearchTree::Node* child =
                parent.node->children[static_cast<std::size_t>(c.decision)].get();
            next.push_back({child, env.applyDecision(parent.state, c.decision), c.score,
                            c.logPiTilde});
        }
        beam = std::move(next);
        tree.addTransitions(beam.size());
    }

    std::stable_sort(beam.begin(), beam.end(),
                     [](const BeamEntry& x, const BeamEntry& y) { return x.score > y.score; });

    std::vector<SampledLeaf> leaves;
    leaves.reserve(beam.size());
    const auto& prefix = tree.rootPartial().decisions;
    for (const BeamEntry& entry : beam) {
        SampledLeaf leaf;
        leaf.decisions.assign(static_cast<std::size_t>(n), -1);
        std::copy(prefix.begin(), prefix.end(), leaf.decisions.begin());
        for (const SearchTree::Node* node = entry.node; node->parent != nullptr;
             node = node->parent)
            leaf.decisions[static_cast<std::size_t>(node->depth - 1)] = node->decisionFromParent;
        leaf.logPi = entry.node->logPi;
        leaf.logPiTilde = entry.logPiTilde;
        leaf.objective = env.terminalObjective(entry.state);
        leaf.score = entry.score;
        leaves.push_back(std::move(leaf));
    }
    return leaves;
}

/// One-shot sampling without replacement from a fresh, unmasked tree.
template <Environment E, PolicyFor<E> P>
std::vector<SampledLeaf> sbsSample(const E& env, const P& policy, int k, RngStream& rng,
                                   const SbsOptions& options = {}) {
    SearchTree tree;
    return sbsSample(tree, env, policy, k, rng, options);
}

} // namespace rebeam
