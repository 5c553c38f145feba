/**
 * @file oracles.hpp
 * @brief Exact desk-scale solvers: Held-Karp dynamic programming for TSP and
 *        a generic exhaustive tree enumerator for any environment. Both are
 *        guarded by explicit size limits and refuse anything larger.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "rebeam/core.hpp"
#include "rebeam/tsp.hpp"

namespace rebeam {

/**
 * @brief Exact TSP solution by Held-Karp dynamic programming over subsets.
 *
 * The tour is anchored at node 0 (a cycle's cost does not depend on the
 * starting node). Requires N <= 18; larger instances raise SizeLimitError.
 * Returns the visit order as decisions and f = -tourLength.
 */
inline Solution heldKarp(const TspInstance& instance) {
    const int n = instance.size();
    if (n > 18) throw SizeLimitError("heldKarp: refusing N > 18");
    [[maybe_unused]] const TspEnv validated(instance);  // bounds + coordinate checks

    if (n == 2) {
        Solution solution;
        solution.decisions = {0, 1};
        solution.objective = -2.0 * distance(instance.coords[0], instance.coords[1]);
        return solution;
    }

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                distance(instance.coords[static_cast<std::size_t>(i)],
                         instance.coords[static_cast<std::size_t>(j)]);

    const std::size_t full = std::size_t{1} << n;
    const double inf = std::numeric_limits<double>::infinity();
    // cost[mask][j]: cheapest path from node 0 through exactly the nodes in
    // mask, ending at j. mask always contains bits 0 and j.
    std::vector<std::vector<double>> cost(full, std::vector<double>(static_cast<std::size_t>(n), inf));
    std::vector<std::vector<std::int8_t>> parent(
        full, std::vector<std::int8_t>(static_cast<std::size_t>(n), -1));
    for (int j = 1; j < n; ++j)
        cost[(std::size_t{1} << j) | 1][static_cast<std::size_t>(j)] =
            dist[0][static_cast<std::size_t>(j)];

    for (std::size_t mask = 1; mask < full; ++mask) {
        if (!(mask & 1)) continue;
        for (int j = 1; j < n; ++j) {
            if (!(mask >> j & 1)) continue;
            const double base = cost[mask][static_cast<std::size_t>(j)];
            if (base == inf) continue;
            for (int next = 1; next < n; ++next) {
                if (mask >> next & 1) continue;
                const std::size_t grown = mask | (std::size_t{1} << next);
                const double candidate =
                    base + dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(next)];
                if (candidate < cost[grown][static_cast<std::size_t>(next)]) {
                    cost[grown][static_cast<std::size_t>(next)] = candidate;
                    parent[grown][static_cast<std::size_t>(next)] = static_cast<std::int8_t>(j);
                }
            }
        }
    }

    const std::size_t all = full - 1;
    double best = inf;
    int bestEnd = -1;
    for (int j = 1; j < n; ++j) {
        const double candidate =
            cost[all][static_cast<std::size_t>(j)] + dist[static_cast<std::size_t>(j)][0];
        if (candidate < best) {
            best = candidate;
            bestEnd = j;
        }
    }

    Solution solution;
    solution.decisions.assign(static_cast<std::size_t>(n), 0);
    std::size_t mask = all;
    int node = bestEnd;
    for (int pos = n - 1; pos >= 1; --pos) {
        solution.decisions[static_cast<std::size_t>(pos)] = node;
        const int prev = parent[mask][static_cast<std::size_t>(node)];
        mask ^= std::size_t{1} << node;
        node = prev;
    }
    solution.decisions[0] = 0;
    solution.objective = -best;
    return solution;
}

/**
 * @brief Exact solution by complete enumeration of the decision tree.
 *
 * Visits every feasible state depth-first and keeps the best terminal
 * objective; among equal objectives the lexicographically smallest decision
 * sequence wins (first found in index order). The traversal counts every
 * visited state and raises SizeLimitError beyond maxStates, leaving no
 * partial answer.
 */
template <Environment E>
Solution exhaustiveOracle(const E& env, std::uint64_t maxStates = 10'000'000) {
    const int n = env.solutionLength();
    Solution best;
    std::vector<DecisionIndex> prefix;
    prefix.reserve(static_cast<std::size_t>(n));
    std::vector<std::vector<std::uint8_t>> maskAtDepth(static_cast<std::size_t>(n));
    std::uint64_t visited = 0;

    auto dfs = [&](auto&& self, const typename E::State& state, int depth) -> void {
        if (++visited > maxStates)
            throw SizeLimitError("exhaustiveOracle: state limit exceeded");
        if (depth == n) {
            const double objective = env.terminalObjective(state);
            if (objective > best.objective) {
                best.objective = objective;
                best.decisions = prefix;
            }
            return;
        }
        const int width = env.branching(state);
        std::vector<std::uint8_t>& mask = maskAtDepth[static_cast<std::size_t>(depth)];
        env.feasibleMask(state, mask);
        for (int a = 0; a < width; ++a) {
            if (!mask[static_cast<std::size_t>(a)]) continue;
            prefix.push_back(a);
            self(self, env.applyDecision(state, a), depth + 1);
            prefix.pop_back();
        }
    };
    dfs(dfs, env.initialState(), 0);

    if (!best.feasible())
        throw InfeasibleError("exhaustiveOracle: no feasible complete sequence", {});
    return best;
}

} // namespace rebeam
