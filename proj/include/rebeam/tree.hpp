/**
 * @file tree.hpp
 * @brief The decoder's persistent search tree.
 *
 * Nodes freeze the policy's transition probabilities when first expanded and
 * carry a mutable unnormalized mass that starts at the node's total
 * probability and only ever shrinks as complete sequences below it are
 * sampled and subtracted. Normalizing the remaining masses over siblings
 * gives the residual distribution the sampler draws from, so already-sampled
 * sequences can never be drawn again.
 */

#pragma once

#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "rebeam/core.hpp"
#include "rebeam/policy.hpp"

namespace rebeam {

/**
 * @brief Prefix tree over decision sequences with mass bookkeeping.
 *
 * Depths and decision sequences are always absolute (counted from the empty
 * prefix), even after the root has been shifted downward; the tree keeps the
 * committed prefix in rootPartial().
 */
class SearchTree {
public:
    struct Node {
        Node* parent = nullptr;
        DecisionIndex decisionFromParent = -1;
        int depth = 0;       ///< absolute prefix length
        double logPi = 0.0;  ///< total log-probability of the prefix, frozen at creation
        double logMass = 0.0;  ///< remaining unnormalized log-mass, only ever decreases
        bool expanded = false;
        std::vector<double> childLogPi;  ///< conditional log-probs frozen at expansion
        std::vector<std::unique_ptr<Node>> children;  ///< null for infeasible decisions

        bool exhausted() const { return logMass == kNegInf; }
    };

    SearchTree() : root_(std::make_unique<Node>()), createdNodes_(1) {}

    Node& root() { return *root_; }
    const Node& root() const { return *root_; }

    int rootDepth() const { return root_->depth; }

    /// Decisions committed so far; the root node corresponds to this prefix.
    const PartialSolution& rootPartial() const { return rootPartial_; }

    /// Total nodes ever created (the root included).
    std::uint64_t createdNodeCount() const { return createdNodes_; }

    /// Nodes currently reachable from the root.
    std::uint64_t liveNodeCount() const { return countSubtree(*root_); }

    /// Node-to-child transitions performed so far (advanced by the sampler).
    std::uint64_t transitionCount() const { return transitions_; }
    void addTransitions(std::uint64_t count) { transitions_ += count; }

    /**
     * @brief Create the children of a node from its conditional distribution.
     *
     * One child per finite-probability decision; each child's total logPi is
     * the parent's plus the conditional, and its mass starts equal to that
     * total. The conditionals are frozen: later mass changes never touch them.
     */
    void expand(Node& node, const PolicyOutput& conditional) {
        if (node.expanded) throw ContractViolation("SearchTree::expand: node already expanded");
        const int width = conditional.size();
        node.childLogPi = conditional.logProbs;
        node.children.resize(static_cast<std::size_t>(width));
        for (int a = 0; a < width; ++a) {
            const double cond = conditional.logProbs[static_cast<std::size_t>(a)];
            if (cond == kNegInf) continue;
            auto child = std::make_unique<Node>();
            child->parent = &node;
            child->decisionFromParent = a;
            child->depth = node.depth + 1;
            child->logPi = node.logPi + cond;
            child->logMass = child->logPi;
            node.children[static_cast<std::size_t>(a)] = std::move(child);
            ++createdNodes_;
        }
        node.expanded = true;
    }

    /**
     * @brief Residual transition distribution over a node's children:
     *        each child's remaining mass normalized by the sibling total,
     *        as log-probabilities (-infinity for infeasible or exhausted).
     *
     * Returns false when every child is exhausted (no distribution exists).
     */
    bool residualDistribution(const Node& node, std::vector<double>& logPiTilde) const {
        if (!node.expanded)
            throw ContractViolation("SearchTree::residualDistribution: node not expanded");
        const std::size_t width = node.children.size();
        logPiTilde.assign(width, kNegInf);
        double denom = kNegInf;
        for (const auto& child : node.children)
            if (child && !child->exhausted()) denom = logAddExp(denom, child->logMass);
        if (denom == kNegInf) return false;
        for (std::size_t a = 0; a < width; ++a)
            if (node.children[a] && !node.children[a]->exhausted())
                logPiTilde[a] = node.children[a]->logMass - denom;
        return true;
    }

    /**
     * @brief Probability of one child under the residual distribution.
     *
     * Raises ExhaustedError when every sibling's mass is gone.
     */
    double normalizedTransition(const Node& node, DecisionIndex decision) const {
        std::vector<double> logPiTilde;
        if (!residualDistribution(node, logPiTilde))
            throw ExhaustedError("normalizedTransition: all children exhausted");
        if (decision < 0 || decision >= static_cast<int>(logPiTilde.size()))
            throw ContractViolation("normalizedTransition: decision out of range");
        const double lp = logPiTilde[static_cast<std::size_t>(decision)];
        return lp == kNegInf ? 0.0 : std::exp(lp);
    }

    /**
     * @brief Subtract a sampled complete sequence from the masses along its
     *        path, at every node of depth >= fromDepth.
     *
     * The sequence is absolute and must run through the current root; the
     * subtracted quantity is the sequence's total probability leafLogPi
     * (the leaf's frozen value). Masses that would drop to zero or below
     * clamp to "exhausted" (-infinity).
     */
    void markSampled(std::span<const DecisionIndex> sequence, double leafLogPi, int fromDepth) {
        checkExtendsRootPrefix(sequence);
        Node* node = root_.get();
        if (node->depth >= fromDepth) subtractMass(*node, leafLogPi);
        for (std::size_t d = static_cast<std::size_t>(root_->depth); d < sequence.size(); ++d) {
            node = childOrThrow(*node, sequence[d], "markSampled");
            if (node->depth >= fromDepth) subtractMass(*node, leafLogPi);
        }
    }

    /**
     * @brief Move the root down to the node for the given absolute prefix.
     *
     * Everything outside the new root's subtree is released. The prefix must
     * extend the current committed prefix and its node must already exist.
     */
    void shiftRoot(std::span<const DecisionIndex> prefix) {
        checkExtendsRootPrefix(prefix);
        Node* node = root_.get();
        for (std::size_t d = static_cast<std::size_t>(root_->depth); d < prefix.size(); ++d)
            node = childOrThrow(*node, prefix[d], "shiftRoot");
        if (node == root_.get()) return;

        std::unique_ptr<Node> detached =
            std::move(node->parent->children[static_cast<std::size_t>(node->decisionFromParent)]);
        root_ = std::move(detached);  // old root subtree released here
        root_->parent = nullptr;
        rootPartial_.decisions.assign(prefix.begin(), prefix.end());
    }

    /// Depth-indented outline of the live tree for test diagnostics.
    void dumpOutline(std::ostream& os, int maxDepth = -1) const {
        dumpNode(os, *root_, 0, maxDepth);
    }

private:
    static void subtractMass(Node& node, double logAmount) {
        node.logMass = logSubExp(node.logMass, logAmount);
    }

    static Node* childOrThrow(Node& node, DecisionIndex a, const char* op) {
        if (!node.expanded || a < 0 || a >= static_cast<int>(node.children.size()) ||
            !node.children[static_cast<std::size_t>(a)])
            throw ContractViolation(std::string(op) + ": path not present in tree");
        return node.children[static_cast<std::size_t>(a)].get();
    }

    void checkExtendsRootPrefix(std::span<const DecisionIndex> sequence) const {
        if (sequence.size() < rootPartial_.decisions.size())
            throw ContractViolation("sequence shorter than the committed prefix");
        for (std::size_t d = 0; d < rootPartial_.decisions.size(); ++d)
            if (sequence[d] != rootPartial_.decisions[d])
                throw ContractViolation("sequence leaves the current root's subtree");
    }

    static std::uint64_t countSubtree(const Node& node) {
        std::uint64_t count = 1;
        for (const auto& child : node.children)
            if (child) count += countSubtree(*child);
        return count;
    }

    void dumpNode(std::ostream& os, const Node& node, int indent, int maxDepth) const {
        for (int i = 0; i < indent; ++i) os << "  ";
        if (node.decisionFromParent < 0)
            os << "root";
        else
            os << "a=" << node.decisionFromParent;
        os << " depth=" << node.depth << " logPi=" << node.logPi << " logMass=" << node.logMass
           << (node.expanded ? " expanded" : "") << "\n";
        if (maxDepth >= 0 && indent >= maxDepth) return;
        for (const auto& child : node.children)
            if (child) dumpNode(os, *child, indent + 1, maxDepth);
    }

    std::unique_ptr<Node> root_;
    PartialSolution rootPartial_;
    std::uint64_t createdNodes_ = 0;
    std::uint64_t transitions_ = 0;
};

} // namespace rebeam
