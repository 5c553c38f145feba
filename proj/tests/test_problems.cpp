#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rebeam/cvrp.hpp"
#include "rebeam/generate.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/oracles.hpp"
#include "rebeam/tsp.hpp"
#include "validators.hpp"

using namespace rebeam;
using rebeam::testing::validateCvrp;
using rebeam::testing::validateJssp;
using rebeam::testing::validateTsp;

namespace {

const TspInstance kUnitSquare{{{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}}};

/// Brute force over all customer orders and depot-split patterns, fully
/// independent of the environment's step logic.
double cvrpBruteForceBestLength(const CvrpInstance& instance) {
    const int n = instance.size();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        for (std::uint32_t splits = 0; splits < (1u << (n - 1)); ++splits) {
            double length = 0.0;
            double load = 0.0;
            bool feasible = true;
            Point position = instance.depot;
            for (int i = 0; i < n && feasible; ++i) {
                const int c = order[static_cast<std::size_t>(i)];
                const bool viaDepot = i == 0 || ((splits >> (i - 1)) & 1u);
                const double demand = instance.demands[static_cast<std::size_t>(c)];
                const Point target = instance.coords[static_cast<std::size_t>(c)];
                if (viaDepot) {
                    length += distance(position, instance.depot) +
                              distance(instance.depot, target);
                    load = demand;
                } else {
                    length += distance(position, target);
                    load += demand;
                }
                if (load > instance.capacity) feasible = false;
                position = target;
            }
            if (!feasible) continue;
            length += distance(position, instance.depot);
            best = std::min(best, length);
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

/// Best makespan over every distinct job sequence, via plain simulation.
long jsspBruteForceBestMakespan(const JsspInstance& instance) {
    std::vector<int> sequence;
    for (int j = 0; j < instance.jobs; ++j)
        for (int m = 0; m < instance.machines; ++m) sequence.push_back(j);
    long best = std::numeric_limits<long>::max();
    do {
        std::vector<int> nextOp(static_cast<std::size_t>(instance.jobs), 0);
        std::vector<long> jobReady(static_cast<std::size_t>(instance.jobs), 0);
        std::vector<long> machineFree(static_cast<std::size_t>(instance.machines), 0);
        for (int j : sequence) {
            const int o = nextOp[static_cast<std::size_t>(j)]++;
            const int m = instance.machineOrder[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)];
            const long start = std::max(jobReady[static_cast<std::size_t>(j)],
                                        machineFree[static_cast<std::size_t>(m)]);
            const long finish =
                start + instance.procTimes[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)];
            jobReady[static_cast<std::size_t>(j)] = finish;
            machineFree[static_cast<std::size_t>(m)] = finish;
        }
        long makespan = 0;
        for (long t : machineFree) makespan = std::max(makespan, t);
        best = std::min(best, makespan);
    } while (std::next_permutation(sequence.begin(), sequence.end()));
    return best;
}

} // namespace

TEST_CASE("tsp: four unit-square corners in order score -4") {
    const TspEnv env(kUnitSquare);
    std::vector<DecisionIndex> tour{0, 1, 2, 3};
    REQUIRE_THAT(evaluate(env, std::span<const DecisionIndex>(tour)),
                 Catch::Matchers::WithinAbs(-4.0, 1e-12));
}

TEST_CASE("tsp: two nodes score -2d in either order") {
    const TspInstance instance{{{0.1, 0.2}, {0.7, 0.9}}};
    const TspEnv env(instance);
    const double d = distance(instance.coords[0], instance.coords[1]);
    std::vector<DecisionIndex> fwd{0, 1};
    std::vector<DecisionIndex> rev{1, 0};
    REQUIRE_THAT(evaluate(env, std::span<const DecisionIndex>(fwd)),
                 Catch::Matchers::WithinAbs(-2.0 * d, 1e-12));
    REQUIRE_THAT(evaluate(env, std::span<const DecisionIndex>(rev)),
                 Catch::Matchers::WithinAbs(-2.0 * d, 1e-12));
}

TEST_CASE("tsp: revisiting a node is a contract violation") {
    const TspEnv env(kUnitSquare);
    auto s = env.initialState();
    s = env.applyDecision(s, 2);
    REQUIRE_THROWS_AS(env.applyDecision(s, 2), ContractViolation);
}

TEST_CASE("tsp: exhaustive enumeration matches Held-Karp on random instances") {
    RngStream rng(314);
    for (int trial = 0; trial < 5; ++trial) {
        RngStream stream = rng.derive(static_cast<std::uint64_t>(trial));
        const TspInstance instance = generateTsp(8, stream);
        const TspEnv env(instance);
        const Solution viaTree = exhaustiveOracle(env);
        const Solution viaDp = heldKarp(instance);
        REQUIRE_THAT(viaTree.objective, Catch::Matchers::WithinAbs(viaDp.objective, 1e-9));
        const auto check = validateTsp(instance, viaDp.decisions, viaDp.objective);
        INFO(check.message);
        REQUIRE(check.ok);
    }
}

TEST_CASE("tsp: both exact solvers agree on 500 random 9-node instances") {
    RngStream rng(1618);
    for (int trial = 0; trial < 500; ++trial) {
        RngStream stream = rng.derive(static_cast<std::uint64_t>(trial));
        const TspInstance instance = generateTsp(9, stream);
        const Solution viaTree = exhaustiveOracle(TspEnv(instance));
        const Solution viaDp = heldKarp(instance);
        REQUIRE_THAT(viaTree.objective, Catch::Matchers::WithinAbs(viaDp.objective, 1e-9));
    }
}

TEST_CASE("heldKarp: unit square optimum is -4 and N > 18 is refused") {
    const Solution best = heldKarp(kUnitSquare);
    REQUIRE_THAT(best.objective, Catch::Matchers::WithinAbs(-4.0, 1e-12));

    RngStream rng(9);
    REQUIRE_THROWS_AS(heldKarp(generateTsp(19, rng)), SizeLimitError);
}

TEST_CASE("exhaustiveOracle: state limit raises a refusal error") {
    RngStream rng(10);
    const TspEnv env(generateTsp(9, rng));
    REQUIRE_THROWS_AS(exhaustiveOracle(env, 1000), SizeLimitError);
}

TEST_CASE("cvrp: single customer out-and-back scores -2") {
    CvrpInstance instance;
    instance.depot = {0.0, 0.0};
    instance.coords = {{0.0, 1.0}};
    instance.demands = {1.0};
    instance.capacity = 5.0;
    const CvrpEnv env(instance);
    std::vector<DecisionIndex> route{1};  // customer 0 via depot
    REQUIRE_THAT(evaluate(env, std::span<const DecisionIndex>(route)),
                 Catch::Matchers::WithinAbs(-2.0, 1e-12));
}

TEST_CASE("cvrp: capacity forces via-depot and masks direct service") {
    CvrpInstance instance;
    instance.depot = {0.5, 0.5};
    instance.coords = {{0.1, 0.1}, {0.9, 0.9}};
    instance.demands = {5.0, 5.0};
    instance.capacity = 5.0;
    const CvrpEnv env(instance);

    auto s = env.initialState();
    s = env.applyDecision(s, 1);  // customer 0 via depot uses the full capacity
    std::vector<std::uint8_t> mask;
    env.feasibleMask(s, mask);
    REQUIRE(mask[2 * 1 + 1]);        // via depot stays open
    REQUIRE_FALSE(mask[2 * 1 + 0]);  // direct service masked

    // Forcing the masked decision violates the contract, and evaluate()
    // treats the full sequence as infeasible.
    REQUIRE_THROWS_AS(env.applyDecision(s, 2 * 1 + 0), ContractViolation);
    std::vector<DecisionIndex> route{1, 2};
    REQUIRE(evaluate(env, std::span<const DecisionIndex>(route)) == kNegInf);
}

TEST_CASE("cvrp: first customer must leave from the depot") {
    CvrpInstance instance;
    instance.depot = {0.5, 0.5};
    instance.coords = {{0.1, 0.1}};
    instance.demands = {1.0};
    instance.capacity = 2.0;
    const CvrpEnv env(instance);
    std::vector<std::uint8_t> mask;
    env.feasibleMask(env.initialState(), mask);
    REQUIRE_FALSE(mask[0]);
    REQUIRE(mask[1]);
    REQUIRE_THROWS_AS(env.applyDecision(env.initialState(), 0), ContractViolation);
}

TEST_CASE("cvrp: exhaustive tree optimum equals order-and-split brute force") {
    RngStream rng(2718);
    for (int trial = 0; trial < 3; ++trial) {
        RngStream stream = rng.derive(static_cast<std::uint64_t>(trial));
        const CvrpInstance instance = generateCvrp(7, stream, 12.0);
        const CvrpEnv env(instance);
        const Solution best = exhaustiveOracle(env, 30'000'000);
        const double bruteLength = cvrpBruteForceBestLength(instance);
        REQUIRE_THAT(best.objective, Catch::Matchers::WithinAbs(-bruteLength, 1e-9));
        const auto check = validateCvrp(instance, best.decisions, best.objective);
        INFO(check.message);
        REQUIRE(check.ok);
    }
}

TEST_CASE("jssp: single operation gives makespan 5") {
    JsspInstance instance{1, 1, {{5}}, {{0}}};
    const JsspEnv env(instance);
    std::vector<DecisionIndex> sequence{0};
    REQUIRE(evaluate(env, std::span<const DecisionIndex>(sequence)) == -5.0);
}

TEST_CASE("jssp: two jobs on one machine sum in either order") {
    JsspInstance instance{2, 1, {{3}, {4}}, {{0}, {0}}};
    const JsspEnv env(instance);
    std::vector<DecisionIndex> ab{0, 1};
    std::vector<DecisionIndex> ba{1, 0};
    REQUIRE(evaluate(env, std::span<const DecisionIndex>(ab)) == -7.0);
    REQUIRE(evaluate(env, std::span<const DecisionIndex>(ba)) == -7.0);
}

TEST_CASE("jssp: 2x2 fixture optimum via exhaustive enumeration") {
    JsspInstance instance{2, 2, {{1, 2}, {3, 4}}, {{0, 1}, {1, 0}}};
    const JsspEnv env(instance);
    const Solution best = exhaustiveOracle(env);
    REQUIRE(best.objective == -static_cast<double>(jsspBruteForceBestMakespan(instance)));
}

TEST_CASE("jssp: exhaustive tree optimum equals multiset-permutation brute force") {
    RngStream rng(999);
    for (int trial = 0; trial < 5; ++trial) {
        RngStream stream = rng.derive(static_cast<std::uint64_t>(trial));
        const JsspInstance instance = generateJssp(3, 3, stream);
        const JsspEnv env(instance);
        const Solution best = exhaustiveOracle(env);
        REQUIRE(best.objective == -static_cast<double>(jsspBruteForceBestMakespan(instance)));
        const auto check = validateJssp(instance, best.decisions, best.objective);
        INFO(check.message);
        REQUIRE(check.ok);
    }
}

TEST_CASE("jssp: scheduling a finished job is masked and throws if forced") {
    JsspInstance instance{2, 1, {{3}, {4}}, {{0}, {0}}};
    const JsspEnv env(instance);
    auto s = env.applyDecision(env.initialState(), 0);
    std::vector<std::uint8_t> mask;
    env.feasibleMask(s, mask);
    REQUIRE_FALSE(mask[0]);
    REQUIRE(mask[1]);
    REQUIRE_THROWS_AS(env.applyDecision(s, 0), ContractViolation);
}

TEST_CASE("jssp: malformed machine orders are rejected") {
    JsspInstance duplicate{2, 2, {{1, 1}, {1, 1}}, {{0, 0}, {0, 1}}};
    REQUIRE_THROWS_AS(JsspEnv(duplicate), ContractViolation);
    JsspInstance negativeTime{1, 1, {{0}}, {{0}}};
    REQUIRE_THROWS_AS(JsspEnv(negativeTime), ContractViolation);
}

TEST_CASE("generateTsp: coordinates in the unit square, deterministic by seed") {
    RngStream a(123);
    const TspInstance first = generateTsp(100, a);
    REQUIRE(first.size() == 100);
    for (const Point& p : first.coords) {
        REQUIRE((p.x >= 0.0 && p.x <= 1.0));
        REQUIRE((p.y >= 0.0 && p.y <= 1.0));
    }
    RngStream b(123);
    REQUIRE(first == generateTsp(100, b));
    RngStream c(124);
    REQUIRE_FALSE(first == generateTsp(100, c));
}

TEST_CASE("generateCvrp: standard capacities and integer demands in 1..9") {
    RngStream rng(55);
    const CvrpInstance big = generateCvrp(100, rng);
    REQUIRE(big.capacity == 50.0);
    for (double d : big.demands) {
        REQUIRE(d >= 1.0);
        REQUIRE(d <= 9.0);
        REQUIRE(d == std::floor(d));
    }
    RngStream rng2(55);
    REQUIRE(generateCvrp(200, rng2).capacity == 80.0);
    RngStream rng3(55);
    REQUIRE(generateCvrp(500, rng3).capacity == 100.0);
    RngStream rng4(55);
    REQUIRE(generateCvrp(40, rng4).capacity == 20.0);  // ceil(N/2) fallback
    RngStream rng5(55);
    REQUIRE(generateCvrp(6, rng5, 10.0).capacity == 10.0);  // explicit override
}

TEST_CASE("generateJssp: times in 1..99 and machine rows are permutations") {
    RngStream rng(77);
    const JsspInstance instance = generateJssp(15, 10, rng);
    REQUIRE(instance.solutionLength() == 150);
    REQUIRE_NOTHROW(validateInstance(instance));
    for (const auto& row : instance.procTimes)
        for (int t : row) {
            REQUIRE(t >= 1);
            REQUIRE(t <= 99);
        }
    // Machine orders are not all identical (the permutation is per job).
    bool anyDifferent = false;
    for (std::size_t j = 1; j < instance.machineOrder.size() && !anyDifferent; ++j)
        anyDifferent = instance.machineOrder[j] != instance.machineOrder[0];
    REQUIRE(anyDifferent);
}
