/**
 * @file features.hpp
 * @brief Hand-crafted feature maps for the linear softmax policy, one per
 *        problem family. Each map is a stateless functor with a compile-time
 *        dimension and a stable id that checkpoints embed, so parameters are
 *        never loaded against the wrong geometry.
 *
 * All features are scaled to O(1) magnitudes so one learning rate works
 * across problems.
 */

#pragma once

#include <algorithm>
#include <span>

#include "rebeam/cvrp.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/tsp.hpp"

namespace rebeam {

/// Single nearest-neighbor signal: the negated distance from the current
/// node to the candidate. With a large positive weight, greedy equals the
/// classic nearest-neighbor heuristic.
struct TspNearestFeature {
    static constexpr int dim = 1;
    static const char* id() { return "tsp-nn-v1"; }

    void operator()(const TspEnv& env, const TspEnv::State& s, DecisionIndex a,
                    std::span<double> out) const {
        const auto& coords = env.instance().coords;
        out[0] = s.count == 0
                     ? 0.0
                     : -distance(coords[static_cast<std::size_t>(s.current)],
                                 coords[static_cast<std::size_t>(a)]);
    }
};

/// TSP features: immediate edge cost, return-to-start awareness (raw and
/// progress-weighted), and two lookahead summaries of the candidate's
/// proximity to the still-unvisited nodes.
struct TspFeatures {
    static constexpr int dim = 5;
    static const char* id() { return "tsp-v1"; }

    void operator()(const TspEnv& env, const TspEnv::State& s, DecisionIndex a,
                    std::span<double> out) const {
        const auto& coords = env.instance().coords;
        const int n = env.instance().size();
        const Point candidate = coords[static_cast<std::size_t>(a)];
        out[0] = s.count == 0
                     ? 0.0
                     : -distance(coords[static_cast<std::size_t>(s.current)], candidate);
        const double toStart =
            s.count == 0 ? 0.0 : distance(candidate, coords[static_cast<std::size_t>(s.first)]);
        out[1] = toStart;
        out[2] = toStart * (static_cast<double>(s.count) / static_cast<double>(n));
        double nearest = 0.0;
        double mean = 0.0;
        int others = 0;
        for (int i = 0; i < n; ++i) {
            if (i == a || s.visited[static_cast<std::size_t>(i)]) continue;
            const double d = distance(candidate, coords[static_cast<std::size_t>(i)]);
            nearest = others == 0 ? d : std::min(nearest, d);
            mean += d;
            ++others;
        }
        out[3] = others == 0 ? 0.0 : -nearest;
        out[4] = others == 0 ? 0.0 : -mean / others;
    }
};

/// CVRP features: immediate added length of the move, depot-return awareness
/// (raw and progress-weighted), capacity slack after the move, the via-depot
/// indicator, and nearest-unvisited lookahead.
struct CvrpFeatures {
    static constexpr int dim = 6;
    static const char* id() { return "cvrp-v1"; }

    void operator()(const CvrpEnv& env, const CvrpEnv::State& s, DecisionIndex a,
                    std::span<double> out) const {
        const CvrpInstance& inst = env.instance();
        const int n = inst.size();
        const int customer = a / 2;
        const bool viaDepot = (a % 2) == 1;
        const Point target = inst.coords[static_cast<std::size_t>(customer)];
        const Point from =
            s.current < 0 ? inst.depot : inst.coords[static_cast<std::size_t>(s.current)];
        const double added = viaDepot
                                 ? distance(from, inst.depot) + distance(inst.depot, target)
                                 : distance(from, target);
        out[0] = -added;
        const double toDepot = distance(target, inst.depot);
        out[1] = toDepot;
        out[2] = toDepot * (static_cast<double>(s.count) / static_cast<double>(n));
        const double demand = inst.demands[static_cast<std::size_t>(customer)];
        const double after = viaDepot ? inst.capacity - demand : s.remaining - demand;
        out[3] = after / inst.capacity;
        out[4] = viaDepot ? 1.0 : 0.0;
        double nearest = 0.0;
        int others = 0;
        for (int i = 0; i < n; ++i) {
            if (i == customer || s.visited[static_cast<std::size_t>(i)]) continue;
            const double d = distance(target, inst.coords[static_cast<std::size_t>(i)]);
            nearest = others == 0 ? d : std::min(nearest, d);
            ++others;
        }
        out[5] = others == 0 ? 0.0 : -nearest;
    }
};

/// JSSP features: negated processing time of the job's ready operation, the
/// job's remaining total work, the wait the machine would impose, and the
/// negated earliest start. Times are normalized by 100 (the largest
/// processing time) and the horizon by 100*M.
struct JsspFeatures {
    static constexpr int dim = 4;
    static const char* id() { return "jssp-v1"; }

    void operator()(const JsspEnv& env, const JsspEnv::State& s, DecisionIndex a,
                    std::span<double> out) const {
        const JsspInstance& inst = env.instance();
        const int o = s.nextOp[static_cast<std::size_t>(a)];
        const double horizon = 100.0 * inst.machines;
        const auto& times = inst.procTimes[static_cast<std::size_t>(a)];
        out[0] = -times[static_cast<std::size_t>(o)] / 100.0;
        double remaining = 0.0;
        for (int rest = o; rest < inst.machines; ++rest)
            remaining += times[static_cast<std::size_t>(rest)];
        out[1] = remaining / horizon;
        const int machine = inst.machineOrder[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
        const double jobReady = static_cast<double>(s.jobReady[static_cast<std::size_t>(a)]);
        const double machineFree = static_cast<double>(s.machineFree[static_cast<std::size_t>(machine)]);
        out[2] = (machineFree - jobReady) / horizon;
        out[3] = -std::max(jobReady, machineFree) / horizon;
    }
};

} // namespace rebeam
