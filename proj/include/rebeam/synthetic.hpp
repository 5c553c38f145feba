/**
 * @file synthetic.hpp
 * @brief Small explicit decision trees with known transition probabilities
 *        and per-leaf objectives. These make decoding laws checkable against
 *        brute-force enumeration.
 */

#pragma once

#include <cmath>
#include <vector>

#include "rebeam/core.hpp"

namespace rebeam {

/**
 * @brief Explicit tree environment: all leaves at the same depth, every
 *        child feasible, transition probabilities stored per node.
 *
 * State is a node id into the stored arrays. The paired SyntheticPolicy
 * reads its conditional distribution straight from the tables.
 */
class SyntheticTreeEnv {
public:
    struct Node {
        std::vector<int> children;        ///< child node ids (empty for leaves)
        std::vector<double> childProb;    ///< transition probabilities, sum to 1
        double leafObjective = 0.0;       ///< meaningful for leaves only
    };

    using State = int;

    SyntheticTreeEnv(int depth, std::vector<Node> nodes)
        : depth_(depth), nodes_(std::move(nodes)) {
        if (depth_ < 1) throw ContractViolation("SyntheticTreeEnv: depth must be >= 1");
        if (nodes_.empty()) throw ContractViolation("SyntheticTreeEnv: no nodes");
        nodeDepths_.assign(nodes_.size(), 0);
        std::vector<int> queue{0};
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int id = queue[head];
            for (int child : nodes_[static_cast<std::size_t>(id)].children) {
                nodeDepths_[static_cast<std::size_t>(child)] =
                    nodeDepths_[static_cast<std::size_t>(id)] + 1;
                queue.push_back(child);
            }
        }
    }

    int solutionLength() const { return depth_; }

    State initialState() const { return 0; }

    int branching(const State& s) const {
        return static_cast<int>(nodes_[static_cast<std::size_t>(s)].children.size());
    }

    void feasibleMask(const State& s, std::vector<std::uint8_t>& mask) const {
        mask.assign(nodes_[static_cast<std::size_t>(s)].children.size(), 1);
    }

    State applyDecision(const State& s, DecisionIndex a) const {
        const Node& node = nodes_[static_cast<std::size_t>(s)];
        if (a < 0 || a >= static_cast<int>(node.children.size()))
            throw ContractViolation("SyntheticTreeEnv: decision out of range");
        return node.children[static_cast<std::size_t>(a)];
    }

    double terminalObjective(const State& s) const {
        const Node& node = nodes_[static_cast<std::size_t>(s)];
        if (!node.children.empty())
            throw ContractViolation("SyntheticTreeEnv: terminalObjective on internal node");
        return node.leafObjective;
    }

    double transitionLogProb(State s, DecisionIndex a) const {
        return std::log(nodes_[static_cast<std::size_t>(s)].childProb[static_cast<std::size_t>(a)]);
    }

    int nodeDepth(State s) const { return nodeDepths_[static_cast<std::size_t>(s)]; }

    const std::vector<Node>& nodes() const { return nodes_; }

    int leafCount() const {
        int count = 0;
        for (const Node& node : nodes_)
            if (node.children.empty()) ++count;
        return count;
    }

private:
    int depth_;
    std::vector<Node> nodes_;
    std::vector<int> nodeDepths_;
};

/// Policy that reproduces a SyntheticTreeEnv's stored transition table.
class SyntheticPolicy {
public:
    double logit(const SyntheticTreeEnv& env, const SyntheticTreeEnv::State& s,
                 DecisionIndex a) const {
        return env.transitionLogProb(s, a);
    }
};

/**
 * @brief Build a tree from per-level branching factors with seeded random
 *        transition probabilities and leaf objectives.
 */
inline SyntheticTreeEnv makeSyntheticTree(const std::vector<int>& branchingPerLevel,
                                          RngStream& rng) {
    const int depth = static_cast<int>(branchingPerLevel.size());
    std::vector<SyntheticTreeEnv::Node> nodes(1);
    std::vector<int> frontier{0};
    for (int level = 0; level < depth; ++level) {
        std::vector<int> next;
        for (int id : frontier) {
            const int width = branchingPerLevel[static_cast<std::size_t>(level)];
            double total = 0.0;
            for (int c = 0; c < width; ++c) {
                const int childId = static_cast<int>(nodes.size());
                nodes.emplace_back();
                nodes[static_cast<std::size_t>(id)].children.push_back(childId);
                const double w = 0.1 + rng.uniform01();
                nodes[static_cast<std::size_t>(id)].childProb.push_back(w);
                total += w;
                next.push_back(childId);
            }
            for (double& p : nodes[static_cast<std::size_t>(id)].childProb) p /= total;
        }
        frontier = std::move(next);
    }
    for (int id : frontier)
        nodes[static_cast<std::size_t>(id)].leafObjective = rng.uniform01();
    return SyntheticTreeEnv(depth, std::move(nodes));
}

/**
 * @brief Random tree with per-node branching drawn from [minBranch, maxBranch],
 *        all leaves at the given depth. Regenerates probabilities per node.
 */
inline SyntheticTreeEnv makeRandomSyntheticTree(int depth, int minBranch, int maxBranch,
                                                RngStream& rng) {
    std::vector<SyntheticTreeEnv::Node> nodes(1);
    std::vector<int> frontier{0};
    for (int level = 0; level < depth; ++level) {
        std::vector<int> next;
        for (int id : frontier) {
            const int width = minBranch + static_cast<int>(rng.below(
                                  static_cast<std::uint64_t>(maxBranch - minBranch + 1)));
            double total = 0.0;
            for (int c = 0; c < width; ++c) {
                const int childId = static_cast<int>(nodes.size());
                nodes.emplace_back();
                nodes[static_cast<std::size_t>(id)].children.push_back(childId);
                const double w = 0.1 + rng.uniform01();
                nodes[static_cast<std::size_t>(id)].childProb.push_back(w);
                total += w;
                next.push_back(childId);
            }
            for (double& p : nodes[static_cast<std::size_t>(id)].childProb) p /= total;
        }
        frontier = std::move(next);
    }
    for (int id : frontier)
        nodes[static_cast<std::size_t>(id)].leafObjective = rng.uniform01();
    return SyntheticTreeEnv(depth, std::move(nodes));
}

} // namespace rebeam
