/**
 * @file core.hpp
 * @brief Problem-independent view of constructive combinatorial optimization:
 *        a solution is a fixed-length sequence of decisions scored by an
 *        objective f, with infeasible sequences mapped to -infinity.
 */

#pragma once

#include <concepts>
#include <span>
#include <sstream>
#include <vector>

#include "rebeam/common.hpp"

namespace rebeam {

/// Prefix of a solution: the first d decisions, d in [0, n].
/// The empty prefix is always valid (the root of the search tree).
struct PartialSolution {
    std::vector<DecisionIndex> decisions;

    int length() const { return static_cast<int>(decisions.size()); }
    bool empty() const { return decisions.empty(); }

    bool operator==(const PartialSolution&) const = default;
};

/// A complete decision sequence together with its objective value.
/// The objective is -infinity exactly when the sequence is infeasible.
struct Solution {
    std::vector<DecisionIndex> decisions;
    double objective = kNegInf;

    int length() const { return static_cast<int>(decisions.size()); }
    bool feasible() const { return objective != kNegInf; }
};

/**
 * @brief Contract for a constructive environment.
 *
 * An environment fixes the solution length n for its instance and exposes,
 * per state: the candidate-space size, a feasibility mask over candidates,
 * a successor function, and the objective of a terminal state. Applying a
 * masked-out decision is a contract violation, never a silent no-op. The
 * objective value is a pure function of the decision sequence.
 */
template <typename E>
concept Environment = requires(const E& env, const typename E::State& s, DecisionIndex a,
                               std::vector<std::uint8_t>& mask) {
    typename E::State;
    { env.solutionLength() } -> std::convertible_to<int>;
    { env.initialState() } -> std::same_as<typename E::State>;
    { env.branching(s) } -> std::convertible_to<int>;
    { env.feasibleMask(s, mask) };
    { env.applyDecision(s, a) } -> std::same_as<typename E::State>;
    { env.terminalObjective(s) } -> std::convertible_to<double>;
};

/**
 * @brief Objective f of a complete decision sequence.
 *
 * Replays the sequence through the environment. Any step that violates the
 * feasibility mask makes the whole solution infeasible and yields -infinity.
 * A length mismatch is a contract violation.
 */
template <Environment E>
double evaluate(const E& env, std::span<const DecisionIndex> decisions) {
    const int n = env.solutionLength();
    if (static_cast<int>(decisions.size()) != n) {
        std::ostringstream msg;
        msg << "evaluate: solution length " << decisions.size() << " != n " << n;
        throw ContractViolation(msg.str());
    }
    typename E::State state = env.initialState();
    std::vector<std::uint8_t> mask;
    for (int d = 0; d < n; ++d) {
        const DecisionIndex a = decisions[d];
        const int width = env.branching(state);
        if (a < 0 || a >= width) return kNegInf;
        env.feasibleMask(state, mask);
        if (!mask[static_cast<std::size_t>(a)]) return kNegInf;
        state = env.applyDecision(state, a);
    }
    return env.terminalObjective(state);
}

template <Environment E>
double evaluate(const E& env, const Solution& solution) {
    return evaluate(env, std::span<const DecisionIndex>(solution.decisions));
}

/// Replay a prefix of decisions from the initial state.
template <Environment E>
typename E::State replayState(const E& env, std::span<const DecisionIndex> prefix) {
    typename E::State state = env.initialState();
    for (DecisionIndex a : prefix) state = env.applyDecision(state, a);
    return state;
}

} // namespace rebeam
