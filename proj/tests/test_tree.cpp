#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rebeam/synthetic.hpp"
#include "rebeam/tree.hpp"
#include "rebeam/tsp.hpp"
#include "test_helpers.hpp"

using namespace rebeam;
using rebeam::testing::enumerateLeaves;

namespace {

PolicyOutput outputOf(std::initializer_list<double> probs) {
    PolicyOutput out;
    for (double p : probs) out.logProbs.push_back(p > 0.0 ? std::log(p) : kNegInf);
    return out;
}

/// Expand every node of a synthetic tree into the search tree.
void expandAll(SearchTree& tree, SearchTree::Node& node, const SyntheticTreeEnv& env,
               SyntheticTreeEnv::State state) {
    if (node.depth == env.solutionLength()) return;
    tree.expand(node, conditional(env, SyntheticPolicy{}, state));
    for (std::size_t a = 0; a < node.children.size(); ++a) {
        if (!node.children[a]) continue;
        expandAll(tree, *node.children[a], env,
                  env.applyDecision(state, static_cast<DecisionIndex>(a)));
    }
}

} // namespace

TEST_CASE("expand: uniform triangle root gets three equal children") {
    const TspInstance triangle{{{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}}};
    const TspEnv env(triangle);
    SearchTree tree;
    tree.expand(tree.root(), conditional(env, UniformPolicy{}, env.initialState()));

    REQUIRE(tree.root().expanded);
    REQUIRE(tree.root().children.size() == 3);
    REQUIRE(tree.createdNodeCount() == 4);
    for (const auto& child : tree.root().children) {
        REQUIRE(child != nullptr);
        REQUIRE_THAT(child->logPi, Catch::Matchers::WithinAbs(std::log(1.0 / 3.0), 1e-12));
        REQUIRE(child->logMass == child->logPi);
        REQUIRE(child->depth == 1);
        REQUIRE_FALSE(child->expanded);
    }
}

TEST_CASE("expand: a single feasible child inherits the parent's total probability") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.25, 0.75}));
    SearchTree::Node& child = *tree.root().children[1];
    tree.expand(child, outputOf({0.0, 1.0}));  // only decision 1 is feasible

    REQUIRE(child.children[0] == nullptr);
    REQUIRE(child.children[1] != nullptr);
    REQUIRE_THAT(child.children[1]->logPi, Catch::Matchers::WithinAbs(child.logPi, 1e-15));
}

TEST_CASE("expand: children's total probabilities sum to the parent's") {
    RngStream rng(11);
    const SyntheticTreeEnv env = makeSyntheticTree({2, 2, 2}, rng);
    SearchTree tree;
    expandAll(tree, tree.root(), env, env.initialState());

    const std::function<void(const SearchTree::Node&)> check = [&](const SearchTree::Node& node) {
        if (!node.expanded) return;
        double sum = 0.0;
        for (const auto& child : node.children) {
            REQUIRE(child != nullptr);
            sum += std::exp(child->logPi);
            check(*child);
        }
        REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(std::exp(node.logPi), 1e-12));
    };
    check(tree.root());
}

TEST_CASE("expand: re-expanding a node violates the contract") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    REQUIRE_THROWS_AS(tree.expand(tree.root(), outputOf({0.5, 0.5})), ContractViolation);
}

TEST_CASE("expand: a complete state offers no conditional to expand with") {
    const TspInstance two{{{0.0, 0.0}, {1.0, 0.0}}};
    const TspEnv env(two);
    auto s = env.applyDecision(env.applyDecision(env.initialState(), 0), 1);
    REQUIRE(s.count == env.solutionLength());
    REQUIRE_THROWS_AS(conditional(env, UniformPolicy{}, s), ContractViolation);
}

TEST_CASE("residual distribution of a fresh node equals the policy's conditionals") {
    RngStream rng(12);
    const SyntheticTreeEnv env = makeSyntheticTree({3, 2}, rng);
    SearchTree tree;
    const PolicyOutput cond = conditional(env, SyntheticPolicy{}, env.initialState());
    tree.expand(tree.root(), cond);

    std::vector<double> logPiTilde;
    REQUIRE(tree.residualDistribution(tree.root(), logPiTilde));
    for (std::size_t a = 0; a < logPiTilde.size(); ++a)
        REQUIRE_THAT(logPiTilde[a], Catch::Matchers::WithinAbs(cond.logProbs[a], 1e-12));
    for (int a = 0; a < 3; ++a)
        REQUIRE_THAT(tree.normalizedTransition(tree.root(), a),
                     Catch::Matchers::WithinAbs(std::exp(cond.logProbs[static_cast<std::size_t>(a)]),
                                                1e-12));
}

TEST_CASE("normalized transitions renormalize the remaining masses") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.3, 0.1}));
    REQUIRE_THAT(tree.normalizedTransition(tree.root(), 0),
                 Catch::Matchers::WithinAbs(0.75, 1e-12));
    REQUIRE_THAT(tree.normalizedTransition(tree.root(), 1),
                 Catch::Matchers::WithinAbs(0.25, 1e-12));

    // Subtracting a 0.1-mass sequence through child 0 leaves masses {0.2, 0.1}.
    const std::vector<DecisionIndex> path{0};
    tree.markSampled(std::span<const DecisionIndex>(path), std::log(0.1), 0);
    REQUIRE_THAT(tree.normalizedTransition(tree.root(), 0),
                 Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    REQUIRE_THAT(tree.normalizedTransition(tree.root(), 1),
                 Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("markSampled: removing the only chain exhausts the whole path") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({1.0}));
    tree.expand(*tree.root().children[0], outputOf({1.0}));
    const std::vector<DecisionIndex> path{0, 0};
    tree.markSampled(std::span<const DecisionIndex>(path), 0.0, 0);

    REQUIRE(tree.root().exhausted());
    REQUIRE(tree.root().children[0]->exhausted());
    REQUIRE(tree.root().children[0]->children[0]->exhausted());
}

TEST_CASE("markSampled: the surviving sibling takes all remaining mass") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    const std::vector<DecisionIndex> left{0};
    tree.markSampled(std::span<const DecisionIndex>(left), std::log(0.5), 0);

    REQUIRE(tree.root().children[0]->exhausted());
    REQUIRE(tree.normalizedTransition(tree.root(), 1) == 1.0);

    std::vector<double> logPiTilde;
    REQUIRE(tree.residualDistribution(tree.root(), logPiTilde));
    REQUIRE(logPiTilde[0] == kNegInf);
    REQUIRE_THAT(logPiTilde[1], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("markSampled: removing every leaf exhausts the parent") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    const std::vector<DecisionIndex> left{0};
    const std::vector<DecisionIndex> right{1};
    tree.markSampled(std::span<const DecisionIndex>(left), std::log(0.5), 0);
    tree.markSampled(std::span<const DecisionIndex>(right), std::log(0.5), 0);

    REQUIRE(tree.root().exhausted());
    std::vector<double> logPiTilde;
    REQUIRE_FALSE(tree.residualDistribution(tree.root(), logPiTilde));
    REQUIRE_THROWS_AS(tree.normalizedTransition(tree.root(), 0), ExhaustedError);
}

TEST_CASE("markSampled: fromDepth leaves shallower ancestors untouched") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    tree.expand(*tree.root().children[0], outputOf({0.5, 0.5}));
    const std::vector<DecisionIndex> path{0, 0};
    tree.markSampled(std::span<const DecisionIndex>(path), std::log(0.25), 1);

    REQUIRE(tree.root().logMass == 0.0);  // depth 0 < fromDepth, untouched
    REQUIRE_THAT(std::exp(tree.root().children[0]->logMass),
                 Catch::Matchers::WithinAbs(0.25, 1e-12));
    REQUIRE(tree.root().children[0]->children[0]->exhausted());
    REQUIRE_THAT(tree.normalizedTransition(tree.root(), 0),
                 Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("markSampled: a path that was never expanded violates the contract") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    const std::vector<DecisionIndex> deep{0, 1};
    REQUIRE_THROWS_AS(tree.markSampled(std::span<const DecisionIndex>(deep), std::log(0.1), 0),
                      ContractViolation);
    const std::vector<DecisionIndex> wide{2};
    REQUIRE_THROWS_AS(tree.markSampled(std::span<const DecisionIndex>(wide), std::log(0.1), 0),
                      ContractViolation);
}

TEST_CASE("shiftRoot: the empty prefix is a no-op") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    SearchTree::Node* before = &tree.root();
    tree.shiftRoot(std::span<const DecisionIndex>{});
    REQUIRE(&tree.root() == before);
    REQUIRE(tree.rootDepth() == 0);
    REQUIRE(tree.rootPartial().decisions.empty());
}

TEST_CASE("shiftRoot: committing two decisions moves the root to depth 2") {
    RngStream rng(13);
    const SyntheticTreeEnv env = makeSyntheticTree({2, 2}, rng);
    SearchTree tree;
    expandAll(tree, tree.root(), env, env.initialState());
    REQUIRE(tree.createdNodeCount() == 7);

    const std::vector<DecisionIndex> prefix{1, 0};
    tree.shiftRoot(std::span<const DecisionIndex>(prefix));
    REQUIRE(tree.rootDepth() == 2);
    REQUIRE(tree.rootPartial().decisions == prefix);
    REQUIRE(tree.root().parent == nullptr);
    REQUIRE(tree.liveNodeCount() == 1);       // the depth-2 node is a leaf here
    REQUIRE(tree.createdNodeCount() == 7);    // creation counter is historical
}

TEST_CASE("shiftRoot: absent or non-extending prefixes violate the contract") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    const std::vector<DecisionIndex> missing{0, 0};
    REQUIRE_THROWS_AS(tree.shiftRoot(std::span<const DecisionIndex>(missing)), ContractViolation);

    const std::vector<DecisionIndex> ok{1};
    tree.shiftRoot(std::span<const DecisionIndex>(ok));
    const std::vector<DecisionIndex> sideways{0};
    REQUIRE_THROWS_AS(tree.shiftRoot(std::span<const DecisionIndex>(sideways)), ContractViolation);
    const std::vector<DecisionIndex> tooShort{};
    REQUIRE_THROWS_AS(tree.shiftRoot(std::span<const DecisionIndex>(tooShort)), ContractViolation);
}

TEST_CASE("marking respects the committed prefix after a shift") {
    SearchTree tree;
    tree.expand(tree.root(), outputOf({0.5, 0.5}));
    tree.expand(*tree.root().children[1], outputOf({0.5, 0.5}));
    const std::vector<DecisionIndex> prefix{1};
    tree.shiftRoot(std::span<const DecisionIndex>(prefix));

    const std::vector<DecisionIndex> outside{0, 0};
    REQUIRE_THROWS_AS(tree.markSampled(std::span<const DecisionIndex>(outside), std::log(0.1), 0),
                      ContractViolation);
    const std::vector<DecisionIndex> inside{1, 0};
    tree.markSampled(std::span<const DecisionIndex>(inside), std::log(0.25), 1);
    REQUIRE(tree.root().children[0]->exhausted());
}

TEST_CASE("mass bookkeeping invariants hold under random leaf removals") {
    RngStream rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        RngStream stream = rng.derive(static_cast<std::uint64_t>(trial));
        const SyntheticTreeEnv env = makeRandomSyntheticTree(4, 2, 3, stream);
        SearchTree tree;
        expandAll(tree, tree.root(), env, env.initialState());
        const auto leaves = enumerateLeaves(env);

        // Mark a random half of the leaves, checking that masses never grow.
        std::vector<std::size_t> marked;
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            if (stream.uniform01() >= 0.5) continue;
            tree.markSampled(std::span<const DecisionIndex>(leaves[i].decisions),
                             std::log(leaves[i].prob), 0);
            marked.push_back(i);
        }

        // Every node's remaining mass equals its total probability minus the
        // marked leaves below it; sibling transitions still normalize.
        std::vector<DecisionIndex> path;
        const std::function<void(const SearchTree::Node&)> check =
            [&](const SearchTree::Node& node) {
                double removed = 0.0;
                for (std::size_t i : marked) {
                    const auto& d = leaves[i].decisions;
                    if (d.size() >= path.size() &&
                        std::equal(path.begin(), path.end(), d.begin()))
                        removed += leaves[i].prob;
                }
                const double expected = std::exp(node.logPi) - removed;
                const double actual = node.exhausted() ? 0.0 : std::exp(node.logMass);
                REQUIRE_THAT(actual, Catch::Matchers::WithinAbs(std::max(expected, 0.0), 1e-9));

                if (node.expanded && !node.exhausted()) {
                    double sum = 0.0;
                    for (std::size_t a = 0; a < node.children.size(); ++a)
                        sum += tree.normalizedTransition(node, static_cast<DecisionIndex>(a));
                    REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
                }
                for (std::size_t a = 0; a < node.children.size(); ++a) {
                    if (!node.children[a]) continue;
                    path.push_back(static_cast<DecisionIndex>(a));
                    check(*node.children[a]);
                    path.pop_back();
                }
            };
        check(tree.root());
    }
}

TEST_CASE("monotone mass: repeated markings only ever shrink a node's mass") {
    RngStream rng(100);
    const SyntheticTreeEnv env = makeRandomSyntheticTree(3, 2, 3, rng);
    SearchTree tree;
    expandAll(tree, tree.root(), env, env.initialState());
    const auto leaves = enumerateLeaves(env);

    double previousRootMass = tree.root().logMass;
    for (const auto& leaf : leaves) {
        tree.markSampled(std::span<const DecisionIndex>(leaf.decisions), std::log(leaf.prob), 0);
        REQUIRE(tree.root().logMass <= previousRootMass);
        previousRootMass = tree.root().logMass;
    }
    REQUIRE(tree.root().exhausted());  // all leaves removed
}
