/**
 * @file validators.hpp
 * @brief Independent feasibility validators. These reconstruct schedules,
 *        routes, and tours from raw decision sequences without reusing the
 *        environment step logic, so environment bugs cannot hide from them.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rebeam/cvrp.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/tsp.hpp"

namespace rebeam::testing {

struct ValidationResult {
    bool ok = true;
    std::string message;

    static ValidationResult failure(std::string why) { return {false, std::move(why)}; }
};

/// A TSP solution must visit every node exactly once; the objective must be
/// the negated closed-tour length.
inline ValidationResult validateTsp(const TspInstance& instance,
                                    const std::vector<DecisionIndex>& decisions,
                                    double objective, double tol = 1e-6) {
    const int n = instance.size();
    if (static_cast<int>(decisions.size()) != n)
        return ValidationResult::failure("tsp: wrong sequence length");
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (DecisionIndex a : decisions) {
        if (a < 0 || a >= n) return ValidationResult::failure("tsp: node index out of range");
        if (seen[static_cast<std::size_t>(a)]++)
            return ValidationResult::failure("tsp: node visited twice");
    }
    double length = 0.0;
    for (int i = 0; i < n; ++i)
        length += distance(instance.coords[static_cast<std::size_t>(decisions[static_cast<std::size_t>(i)])],
                           instance.coords[static_cast<std::size_t>(
                               decisions[static_cast<std::size_t>((i + 1) % n)])]);
    if (std::abs(-length - objective) > tol)
        return ValidationResult::failure("tsp: objective does not match recomputed tour length");
    return {};
}

/// A CVRP solution must serve every customer once, lead the first customer
/// through the depot, respect capacity on every depot-to-depot subtour, and
/// match the negated route length.
inline ValidationResult validateCvrp(const CvrpInstance& instance,
                                     const std::vector<DecisionIndex>& decisions,
                                     double objective, double tol = 1e-6) {
    const int n = static_cast<int>(instance.coords.size());
    if (static_cast<int>(decisions.size()) != n)
        return ValidationResult::failure("cvrp: wrong sequence length");
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    double length = 0.0;
    double load = 0.0;
    Point position = instance.depot;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
        const DecisionIndex d = decisions[i];
        if (d < 0 || d >= 2 * n) return ValidationResult::failure("cvrp: decision out of range");
        const int customer = d / 2;
        const bool viaDepot = (d % 2) != 0;
        if (i == 0 && !viaDepot)
            return ValidationResult::failure("cvrp: first customer not via depot");
        if (seen[static_cast<std::size_t>(customer)]++)
            return ValidationResult::failure("cvrp: customer served twice");
        const double demand = instance.demands[static_cast<std::size_t>(customer)];
        const Point target = instance.coords[static_cast<std::size_t>(customer)];
        if (viaDepot) {
            length += distance(position, instance.depot) + distance(instance.depot, target);
            load = demand;
        } else {
            length += distance(position, target);
            load += demand;
        }
        if (load > instance.capacity + 1e-9)
            return ValidationResult::failure("cvrp: subtour exceeds capacity");
        position = target;
    }
    length += distance(position, instance.depot);
    if (std::abs(-length - objective) > tol)
        return ValidationResult::failure("cvrp: objective does not match recomputed route length");
    return {};
}

/// A JSSP solution is a job sequence containing each job exactly M times.
/// Reconstructs all operation start times under the earliest-start rule,
/// then checks precedence and machine exclusivity pairwise and the makespan
/// against the objective.
inline ValidationResult validateJssp(const JsspInstance& instance,
                                     const std::vector<DecisionIndex>& decisions,
                                     double objective) {
    const int jobs = instance.jobs;
    const int machines = instance.machines;
    if (static_cast<int>(decisions.size()) != jobs * machines)
        return ValidationResult::failure("jssp: wrong sequence length");

    struct Op {
        int job, opIndex, machine, start, finish;
    };
    std::vector<Op> ops;
    std::vector<int> nextOp(static_cast<std::size_t>(jobs), 0);
    std::vector<int> jobReady(static_cast<std::size_t>(jobs), 0);
    std::vector<int> machineFree(static_cast<std::size_t>(machines), 0);
    for (DecisionIndex j : decisions) {
        if (j < 0 || j >= jobs) return ValidationResult::failure("jssp: job index out of range");
        const int o = nextOp[static_cast<std::size_t>(j)]++;
        if (o >= machines) return ValidationResult::failure("jssp: job scheduled too often");
        const int machine = instance.machineOrder[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)];
        const int duration = instance.procTimes[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)];
        const int start = std::max(jobReady[static_cast<std::size_t>(j)],
                                   machineFree[static_cast<std::size_t>(machine)]);
        ops.push_back({j, o, machine, start, start + duration});
        jobReady[static_cast<std::size_t>(j)] = start + duration;
        machineFree[static_cast<std::size_t>(machine)] = start + duration;
    }
    for (int j = 0; j < jobs; ++j)
        if (nextOp[static_cast<std::size_t>(j)] != machines)
            return ValidationResult::failure("jssp: job has unscheduled operations");

    // Pairwise checks, independent of the accumulation order above.
    for (std::size_t a = 0; a < ops.size(); ++a) {
        for (std::size_t b = a + 1; b < ops.size(); ++b) {
            const Op& x = ops[a];
            const Op& y = ops[b];
            if (x.job == y.job && x.opIndex + 1 == y.opIndex && y.start < x.finish)
                return ValidationResult::failure("jssp: precedence violated");
            if (x.machine == y.machine && x.start < y.finish && y.start < x.finish)
                return ValidationResult::failure("jssp: machine exclusivity violated");
        }
    }
    int makespan = 0;
    for (const Op& op : ops) makespan = std::max(makespan, op.finish);
    if (static_cast<double>(-makespan) != objective)
        return ValidationResult::failure("jssp: objective does not match recomputed makespan");
    return {};
}

} // namespace rebeam::testing
