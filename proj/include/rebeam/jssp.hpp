/**
 * @file jssp.hpp
 * @brief Job shop scheduling as a constructive environment. A solution is a
 *        sequence of job indices of length J*M; each pick schedules the job's
 *        next ready operation at its earliest feasible start (semi-active
 *        schedule). Objective is the negated makespan.
 */

#pragma once

#include <vector>

#include "rebeam/core.hpp"

namespace rebeam {

struct JsspInstance {
    int jobs = 0;
    int machines = 0;
    /// procTimes[j][o]: processing time of job j's o-th operation.
    std::vector<std::vector<int>> procTimes;
    /// machineOrder[j][o]: machine running job j's o-th operation; each row
    /// is a permutation of {0,...,M-1}.
    std::vector<std::vector<int>> machineOrder;

    int solutionLength() const { return jobs * machines; }

    bool operator==(const JsspInstance&) const = default;
};

/// Validates row shapes, positive processing times and per-job machine
/// permutations. Throws ContractViolation on the first defect.
inline void validateInstance(const JsspInstance& inst) {
    if (inst.jobs < 1 || inst.machines < 1)
        throw ContractViolation("JsspInstance: jobs and machines must be positive");
    if (static_cast<int>(inst.procTimes.size()) != inst.jobs ||
        static_cast<int>(inst.machineOrder.size()) != inst.jobs)
        throw ContractViolation("JsspInstance: row count != jobs");
    std::vector<std::uint8_t> seen;
    for (int j = 0; j < inst.jobs; ++j) {
        if (static_cast<int>(inst.procTimes[j].size()) != inst.machines ||
            static_cast<int>(inst.machineOrder[j].size()) != inst.machines)
            throw ContractViolation("JsspInstance: row length != machines");
        seen.assign(static_cast<std::size_t>(inst.machines), 0);
        for (int o = 0; o < inst.machines; ++o) {
            if (inst.procTimes[j][o] <= 0)
                throw ContractViolation("JsspInstance: processing times must be positive");
            const int m = inst.machineOrder[j][o];
            if (m < 0 || m >= inst.machines || seen[static_cast<std::size_t>(m)])
                throw ContractViolation("JsspInstance: machine order row is not a permutation");
            seen[static_cast<std::size_t>(m)] = 1;
        }
    }
}

/**
 * @brief Constructive JSSP environment over job-index sequences.
 */
class JsspEnv {
public:
    struct State {
        std::vector<int> nextOp;       ///< per job: index of next unscheduled operation
        std::vector<long> jobReady;    ///< per job: finish time of its last scheduled op
        std::vector<long> machineFree; ///< per machine: time the machine becomes free
        int scheduled = 0;
    };

    explicit JsspEnv(JsspInstance instance) : instance_(std::move(instance)) {
        validateInstance(instance_);
    }

    const JsspInstance& instance() const { return instance_; }

    int solutionLength() const { return instance_.solutionLength(); }

    State initialState() const {
        State s;
        s.nextOp.assign(static_cast<std::size_t>(instance_.jobs), 0);
        s.jobReady.assign(static_cast<std::size_t>(instance_.jobs), 0);
        s.machineFree.assign(static_cast<std::size_t>(instance_.machines), 0);
        return s;
    }

    int branching(const State&) const { return instance_.jobs; }

    void feasibleMask(const State& s, std::vector<std::uint8_t>& mask) const {
        mask.assign(static_cast<std::size_t>(instance_.jobs), 0);
        for (int j = 0; j < instance_.jobs; ++j)
            mask[static_cast<std::size_t>(j)] = s.nextOp[static_cast<std::size_t>(j)] < instance_.machines;
    }

    State applyDecision(const State& s, DecisionIndex a) const {
        if (a < 0 || a >= instance_.jobs) throw ContractViolation("JsspEnv: job index out of range");
        const int o = s.nextOp[static_cast<std::size_t>(a)];
        if (o >= instance_.machines)
            throw ContractViolation("JsspEnv: job has no unscheduled operations");
        State next = s;
        const int m = instance_.machineOrder[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
        const long start = std::max(s.jobReady[static_cast<std::size_t>(a)],
                                    s.machineFree[static_cast<std::size_t>(m)]);
        const long finish = start + instance_.procTimes[static_cast<std::size_t>(a)][static_cast<std::size_t>(o)];
        next.nextOp[static_cast<std::size_t>(a)] = o + 1;
        next.jobReady[static_cast<std::size_t>(a)] = finish;
        next.machineFree[static_cast<std::size_t>(m)] = finish;
        next.scheduled = s.scheduled + 1;
        return next;
    }

    /// Negated makespan.
    double terminalObjective(const State& s) const {
        if (s.scheduled != solutionLength())
            throw ContractViolation("JsspEnv: terminalObjective on non-terminal state");
        long makespan = 0;
        for (long t : s.machineFree) makespan = std::max(makespan, t);
        return -static_cast<double>(makespan);
    }

private:
    JsspInstance instance_;
};

} // namespace rebeam
