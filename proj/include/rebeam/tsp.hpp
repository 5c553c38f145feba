/**
 * @file tsp.hpp
 * @brief Euclidean TSP on the unit square as a constructive environment:
 *        one unvisited node is chosen per step, the tour closes back to the
 *        first node, and the objective is the negated tour length.
 */

#pragma once

#include <bitset>
#include <cmath>
#include <vector>

#include "rebeam/core.hpp"

namespace rebeam {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Largest node count supported by the fixed-width visited sets.
inline constexpr int kMaxRoutingNodes = 512;

struct TspInstance {
    std::vector<Point> coords;

    int size() const { return static_cast<int>(coords.size()); }

    bool operator==(const TspInstance&) const = default;
};

/**
 * @brief Constructive TSP environment.
 *
 * The candidate space at every state is the full node set; visited nodes are
 * masked. The first decision picks the start node. n equals the node count.
 */
class TspEnv {
public:
    struct State {
        std::bitset<kMaxRoutingNodes> visited;
        int current = -1;
        int first = -1;
        int count = 0;
        double length = 0.0;
    };

    explicit TspEnv(TspInstance instance) : instance_(std::move(instance)) {
        if (instance_.size() < 2) throw ContractViolation("TspEnv: need at least 2 nodes");
        if (instance_.size() > kMaxRoutingNodes)
            throw SizeLimitError("TspEnv: instance exceeds supported node count");
        for (const Point& p : instance_.coords) {
            if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0)
                throw ContractViolation("TspEnv: coordinates outside the unit square");
        }
    }

    const TspInstance& instance() const { return instance_; }

    int solutionLength() const { return instance_.size(); }

    State initialState() const { return State{}; }

    int branching(const State&) const { return instance_.size(); }

    void feasibleMask(const State& s, std::vector<std::uint8_t>& mask) const {
        const int n = instance_.size();
        mask.assign(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) mask[static_cast<std::size_t>(i)] = !s.visited[static_cast<std::size_t>(i)];
    }

    State applyDecision(const State& s, DecisionIndex a) const {
        const int n = instance_.size();
        if (a < 0 || a >= n) throw ContractViolation("TspEnv: decision out of range");
        if (s.visited[static_cast<std::size_t>(a)])
            throw ContractViolation("TspEnv: node already visited");
        State next = s;
        next.visited.set(static_cast<std::size_t>(a));
        if (s.count == 0) {
            next.first = a;
        } else {
            next.length += distance(instance_.coords[static_cast<std::size_t>(s.current)],
                                    instance_.coords[static_cast<std::size_t>(a)]);
        }
        next.current = a;
        next.count = s.count + 1;
        return next;
    }

    /// Negated tour length, closing the loop back to the first node.
    double terminalObjective(const State& s) const {
        if (s.count != instance_.size())
            throw ContractViolation("TspEnv: terminalObjective on non-terminal state");
        return -(s.length + distance(instance_.coords[static_cast<std::size_t>(s.current)],
                                     instance_.coords[static_cast<std::size_t>(s.first)]));
    }

private:
    TspInstance instance_;
};

} // namespace rebeam
