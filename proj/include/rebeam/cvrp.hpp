/**
 * @file cvrp.hpp
 * @brief Capacitated VRP as a constructive environment. Each step serves one
 *        unvisited customer either directly from the previous customer or via
 *        the depot (which resets the remaining capacity), so every solution
 *        has length N regardless of its number of subtours.
 */

#pragma once

#include <bitset>
#include <vector>

#include "rebeam/tsp.hpp"

namespace rebeam {

struct CvrpInstance {
    std::vector<Point> coords;       ///< customer locations
    Point depot;
    std::vector<double> demands;
    double capacity = 0.0;

    int size() const { return static_cast<int>(coords.size()); }

    bool operator==(const CvrpInstance&) const = default;
};

/**
 * @brief Constructive CVRP environment.
 *
 * Decision encoding: index 2*c + v serves customer c, with v = 0 direct from
 * the previous customer and v = 1 via the depot. The via-depot action is
 * always feasible (instances require every demand <= capacity), so dead ends
 * cannot occur. The first served customer is always via the depot.
 */
class CvrpEnv {
public:
    struct State {
        std::bitset<kMaxRoutingNodes> visited;
        int current = -1;            ///< -1 while at the depot
        int count = 0;
        double remaining = 0.0;
        double length = 0.0;
    };

    explicit CvrpEnv(CvrpInstance instance) : instance_(std::move(instance)) {
        const int n = instance_.size();
        if (n < 1) throw ContractViolation("CvrpEnv: need at least 1 customer");
        if (n > kMaxRoutingNodes) throw SizeLimitError("CvrpEnv: instance exceeds supported size");
        if (static_cast<int>(instance_.demands.size()) != n)
            throw ContractViolation("CvrpEnv: demand count != customer count");
        for (double d : instance_.demands) {
            if (d <= 0.0) throw ContractViolation("CvrpEnv: demands must be positive");
            if (d > instance_.capacity)
                throw ContractViolation("CvrpEnv: demand exceeds vehicle capacity");
        }
    }

    const CvrpInstance& instance() const { return instance_; }

    int solutionLength() const { return instance_.size(); }

    State initialState() const {
        State s;
        s.remaining = instance_.capacity;
        return s;
    }

    int branching(const State&) const { return 2 * instance_.size(); }

    void feasibleMask(const State& s, std::vector<std::uint8_t>& mask) const {
        const int n = instance_.size();
        mask.assign(static_cast<std::size_t>(2 * n), 0);
        for (int c = 0; c < n; ++c) {
            if (s.visited[static_cast<std::size_t>(c)]) continue;
            mask[static_cast<std::size_t>(2 * c + 1)] = 1;  // via depot: always feasible
            if (s.count > 0 && s.remaining >= instance_.demands[static_cast<std::size_t>(c)])
                mask[static_cast<std::size_t>(2 * c)] = 1;
        }
    }

    State applyDecision(const State& s, DecisionIndex a) const {
        const int n = instance_.size();
        if (a < 0 || a >= 2 * n) throw ContractViolation("CvrpEnv: decision out of range");
        const int c = a / 2;
        const bool viaDepot = (a % 2) == 1;
        if (s.visited[static_cast<std::size_t>(c)])
            throw ContractViolation("CvrpEnv: customer already served");
        if (!viaDepot && s.count == 0)
            throw ContractViolation("CvrpEnv: first customer must be reached via the depot");
        const double demand = instance_.demands[static_cast<std::size_t>(c)];
        if (!viaDepot && s.remaining < demand)
            throw ContractViolation("CvrpEnv: direct visit exceeds remaining capacity");

        State next = s;
        next.visited.set(static_cast<std::size_t>(c));
        const Point& target = instance_.coords[static_cast<std::size_t>(c)];
        const Point from = s.current < 0 ? instance_.depot
                                         : instance_.coords[static_cast<std::size_t>(s.current)];
        if (viaDepot) {
            next.length += distance(from, instance_.depot) + distance(instance_.depot, target);
            next.remaining = instance_.capacity - demand;
        } else {
            next.length += distance(from, target);
            next.remaining = s.remaining - demand;
        }
        next.current = c;
        next.count = s.count + 1;
        return next;
    }

    /// Negated total length, closing the final subtour at the depot.
    double terminalObjective(const State& s) const {
        if (s.count != instance_.size())
            throw ContractViolation("CvrpEnv: terminalObjective on non-terminal state");
        const Point last = instance_.coords[static_cast<std::size_t>(s.current)];
        return -(s.length + distance(last, instance_.depot));
    }

private:
    CvrpInstance instance_;
};

} // namespace rebeam
