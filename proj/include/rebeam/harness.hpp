/**
 * @file harness.hpp
 * @brief Benchmark layer: baseline decoders (plain without-replacement
 *        sampling, i.i.d. sampling, greedy, deterministic beam search),
 *        equal-budget strategy comparison with mean and standard-error
 *        summaries, gap computation against reference costs, and evaluation
 *        of job-shop benchmark directories.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rebeam/decode.hpp"
#include "rebeam/io.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/sil.hpp"

namespace rebeam {

// ---------------------------------------------------------------------------
// Baseline decoders
// ---------------------------------------------------------------------------

/// Best of `count` independent policy rollouts.
template <Environment E, PolicyFor<E> P>
Solution baselineIidSample(const E& env, const P& policy, int count, RngStream& rng,
                           double temperature = 1.0) {
    if (count < 1) throw ContractViolation("baselineIidSample: count must be >= 1");
    Solution best;
    for (int i = 0; i < count; ++i) {
        Solution sample = rollout(env, policy, RolloutMode::Sample, rng, temperature);
        if (sample.objective > best.objective) best = std::move(sample);
    }
    return best;
}

/// Best of one width-`count` without-replacement sampling round (no stepping).
template <Environment E, PolicyFor<E> P>
Solution baselineSbsPlain(const E& env, const P& policy, int count, RngStream& rng,
                          const SbsOptions& options = {}) {
    if (count < 1) throw ContractViolation("baselineSbsPlain: count must be >= 1");
    const auto leaves = sbsSample(env, policy, count, rng, options);
    if (leaves.empty()) throw InfeasibleError("baselineSbsPlain: no sequence found", {});
    Solution best;
    for (const SampledLeaf& leaf : leaves) {
        if (leaf.objective > best.objective) {
            best.decisions = leaf.decisions;
            best.objective = leaf.objective;
        }
    }
    return best;
}

/// Deterministic beam search: the sampling machinery with all noise at zero.
/// Width 1 is exactly a greedy rollout.
template <Environment E, PolicyFor<E> P>
Solution baselineBeamSearch(const E& env, const P& policy, int width, double topP = 1.0,
                            double temperature = 1.0) {
    if (width < 1) throw ContractViolation("baselineBeamSearch: width must be >= 1");
    RngStream unused(0);  // noiseless mode draws nothing
    SbsOptions options;
    options.topP = topP;
    options.temperature = temperature;
    options.noiseless = true;
    const auto leaves = sbsSample(env, policy, width, unused, options);
    if (leaves.empty()) throw InfeasibleError("baselineBeamSearch: no sequence found", {});
    Solution best;
    for (const SampledLeaf& leaf : leaves) {
        if (leaf.objective > best.objective) {
            best.decisions = leaf.decisions;
            best.objective = leaf.objective;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

enum class Strategy { StepReconsider, SbsPlain, IidSampling, Greedy, BeamSearch };

inline const char* strategyName(Strategy s) {
    switch (s) {
        case Strategy::StepReconsider: return "step-reconsider";
        case Strategy::SbsPlain: return "sbs-plain";
        case Strategy::IidSampling: return "iid-sampling";
        case Strategy::Greedy: return "greedy";
        case Strategy::BeamSearch: return "beam-search";
    }
    throw ContractViolation("strategyName: unknown strategy");
}

inline Strategy strategyFromName(const std::string& name) {
    if (name == "step-reconsider") return Strategy::StepReconsider;
    if (name == "sbs-plain") return Strategy::SbsPlain;
    if (name == "iid-sampling") return Strategy::IidSampling;
    if (name == "greedy") return Strategy::Greedy;
    if (name == "beam-search") return Strategy::BeamSearch;
    throw IoError("unknown strategy '" + name + "'");
}

/// Shared decoding knobs. With budgetEqualized set, the single-round
/// samplers draw k * ceil(h) sequences so they never get less budget than
/// the round-based decoder's g(k, s) transitions.
struct StrategySettings {
    int k = 16;
    int s = 1;
    double topP = 1.0;
    double temperature = 1.0;
    bool budgetEqualized = true;
};

struct StrategyRun {
    Solution best;
    std::uint64_t transitions = 0;  ///< idealized: sequences x levels
    int roundsExecuted = 0;
};

/// Number of sequences the single-round samplers may draw per instance.
inline int singleRoundSampleCount(const StrategySettings& settings, int n) {
    if (!settings.budgetEqualized) return settings.k;
    return static_cast<int>(equalizedSampleCount(settings.k, std::min(settings.s, n), n));
}

template <Environment E, PolicyFor<E> P>
StrategyRun runStrategy(Strategy strategy, const E& env, const P& policy,
                        const StrategySettings& settings, RngStream& rng) {
    const int n = env.solutionLength();
    const std::uint64_t perSequence = static_cast<std::uint64_t>(n);
    StrategyRun run;
    switch (strategy) {
        case Strategy::StepReconsider: {
            DecodeConfig config;
            config.k = settings.k;
            config.s = std::min(settings.s, n);
            config.topP = settings.topP;
            config.temperature = settings.temperature;
            config.recordRounds = false;
            const DecodeResult result = decode(env, policy, config, rng);
            run.best = result.best;
            run.transitions = result.transitionsUsed;
            run.roundsExecuted = result.roundsExecuted;
            return run;
        }
        case Strategy::SbsPlain: {
            const int count = singleRoundSampleCount(settings, n);
            SbsOptions options;
            options.topP = settings.topP;
            options.temperature = settings.temperature;
            const auto leaves = sbsSample(env, policy, count, rng, options);
            for (const SampledLeaf& leaf : leaves) {
                if (leaf.objective > run.best.objective) {
                    run.best.decisions = leaf.decisions;
                    run.best.objective = leaf.objective;
                }
            }
            run.transitions = leaves.size() * perSequence;
            run.roundsExecuted = 1;
            return run;
        }
        case Strategy::IidSampling: {
            const int count = singleRoundSampleCount(settings, n);
            run.best = baselineIidSample(env, policy, count, rng, settings.temperature);
            run.transitions = static_cast<std::uint64_t>(count) * perSequence;
            run.roundsExecuted = 1;
            return run;
        }
        case Strategy::Greedy: {
            run.best = rollout(env, policy, RolloutMode::Greedy, rng, settings.temperature);
            run.transitions = perSequence;
            run.roundsExecuted = 1;
            return run;
        }
        case Strategy::BeamSearch: {
            run.best =
                baselineBeamSearch(env, policy, settings.k, settings.topP, settings.temperature);
            run.transitions = static_cast<std::uint64_t>(settings.k) * perSequence;
            run.roundsExecuted = 1;
            return run;
        }
    }
    throw ContractViolation("runStrategy: unknown strategy");
}

// ---------------------------------------------------------------------------
// Result rows and gaps
// ---------------------------------------------------------------------------

/**
 * @brief Percentage above the reference cost: 0 at the reference, positive
 *        when worse. Objectives are negated costs, so the decoded cost is
 *        -objective.
 */
inline double gapPercent(double objective, double referenceCost) {
    if (referenceCost <= 0.0)
        throw ContractViolation("gapPercent: reference cost must be positive");
    const double cost = -objective;
    return 100.0 * (cost - referenceCost) / referenceCost;
}

struct ResultRow {
    std::string instanceId;
    std::string strategy;
    double bestObjective = kNegInf;
    std::optional<double> gap;  ///< percent; only when a reference is known
    double wallTimeMs = 0.0;
    std::uint64_t transitions = 0;
    std::uint64_t seed = 0;
};

/// Header plus one row per result. With includeTiming off, the timing
/// column is written as 0 so identical seeds give byte-identical files.
inline void writeResultsCsv(std::ostream& os, std::span<const ResultRow> rows,
                            bool includeTiming = true) {
    CsvWriter csv(os);
    csv.writeRow({"instanceId", "strategy", "bestObjective", "gapPercent", "wallTimeMs",
                  "transitions", "seed"});
    for (const ResultRow& row : rows) {
        csv.writeRow({row.instanceId, row.strategy, formatDouble(row.bestObjective),
                      row.gap ? formatDouble(*row.gap) : std::string{},
                      includeTiming ? formatDouble(row.wallTimeMs) : std::string{"0"},
                      std::to_string(row.transitions), std::to_string(row.seed)});
    }
}

// ---------------------------------------------------------------------------
// Equal-budget comparison
// ---------------------------------------------------------------------------

struct CompareConfig {
    std::vector<Strategy> strategies{Strategy::StepReconsider, Strategy::SbsPlain,
                                     Strategy::IidSampling};
    StrategySettings settings;
    int repetitions = 1;
    std::uint64_t seed = 0;
    int workers = 1;
    bool includeTiming = true;
};

struct StrategySummary {
    std::string strategy;
    double meanBestObjective = 0.0;  ///< mean over repetitions of per-rep instance means
    double stderrBestObjective = 0.0;  ///< standard error over repetition means
    std::optional<double> meanGap;
    double meanTransitions = 0.0;
};

struct CompareOutcome {
    std::vector<ResultRow> rows;  ///< instance-major, then strategy, then repetition
    std::vector<StrategySummary> summary;
};

/// Summary CSV: one row per strategy with mean, standard error, and budget.
inline void writeSummaryCsv(std::ostream& os, std::span<const StrategySummary> summary) {
    CsvWriter csv(os);
    csv.writeRow({"strategy", "meanBestObjective", "stderrBestObjective", "meanGapPercent",
                  "meanTransitions"});
    for (const StrategySummary& s : summary) {
        csv.writeRow({s.strategy, formatDouble(s.meanBestObjective),
                      formatDouble(s.stderrBestObjective),
                      s.meanGap ? formatDouble(*s.meanGap) : std::string{},
                      formatDouble(s.meanTransitions)});
    }
}

/**
 * @brief Run every selected strategy over every instance and repetition.
 *
 * Each (instance, repetition) pair gets its own derived stream, so results
 * are identical for any worker count. referenceCosts, when given, must hold
 * one positive cost per instance; ids, when given, one label per instance.
 */
template <Environment E, PolicyFor<E> P>
CompareOutcome compareStrategies(const std::vector<E>& envs, const P& policy,
                                 const CompareConfig& config,
                                 const std::vector<double>* referenceCosts = nullptr,
                                 const std::vector<std::string>* ids = nullptr) {
    if (envs.empty()) throw ContractViolation("compareStrategies: no instances");
    if (config.repetitions < 1)
        throw ContractViolation("compareStrategies: repetitions must be >= 1");
    if (referenceCosts && referenceCosts->size() != envs.size())
        throw ContractViolation("compareStrategies: one reference cost per instance required");
    if (ids && ids->size() != envs.size())
        throw ContractViolation("compareStrategies: one id per instance required");

    const std::size_t strategyCount = config.strategies.size();
    const std::size_t reps = static_cast<std::size_t>(config.repetitions);
    CompareOutcome outcome;
    outcome.rows.resize(envs.size() * strategyCount * reps);

    const RngStream base(config.seed);
    parallelFor(envs.size(), static_cast<unsigned>(std::max(config.workers, 1)),
                [&](std::size_t i) {
                    const RngStream instanceRng = base.derive(i);
                    for (std::size_t s = 0; s < strategyCount; ++s) {
                        for (std::size_t r = 0; r < reps; ++r) {
                            // Same (instance, rep) noise for every strategy: a
                            // paired comparison, not independent draws.
                            RngStream rng = instanceRng.derive(r);
                            const auto start = std::chrono::steady_clock::now();
                            const StrategyRun run = runStrategy(config.strategies[s], envs[i],
                                                                policy, config.settings, rng);
                            const auto stop = std::chrono::steady_clock::now();

                            ResultRow& row =
                                outcome.rows[(i * strategyCount + s) * reps + r];
                            row.instanceId = ids ? (*ids)[i] : std::to_string(i);
                            row.strategy = strategyName(config.strategies[s]);
                            row.bestObjective = run.best.objective;
                            if (referenceCosts)
                                row.gap = gapPercent(run.best.objective, (*referenceCosts)[i]);
                            row.wallTimeMs =
                                std::chrono::duration<double, std::milli>(stop - start).count();
                            row.transitions = run.transitions;
                            row.seed = config.seed;
                        }
                    }
                });

    for (std::size_t s = 0; s < strategyCount; ++s) {
        StrategySummary summary;
        summary.strategy = strategyName(config.strategies[s]);
        std::vector<double> repMeans(reps, 0.0);
        double gapTotal = 0.0;
        double transitionTotal = 0.0;
        for (std::size_t r = 0; r < reps; ++r) {
            for (std::size_t i = 0; i < envs.size(); ++i) {
                const ResultRow& row = outcome.rows[(i * strategyCount + s) * reps + r];
                repMeans[r] += row.bestObjective;
                if (row.gap) gapTotal += *row.gap;
                transitionTotal += static_cast<double>(row.transitions);
            }
            repMeans[r] /= static_cast<double>(envs.size());
            summary.meanBestObjective += repMeans[r];
        }
        summary.meanBestObjective /= static_cast<double>(reps);
        if (reps > 1) {
            double variance = 0.0;
            for (double m : repMeans) {
                const double d = m - summary.meanBestObjective;
                variance += d * d;
            }
            variance /= static_cast<double>(reps - 1);
            summary.stderrBestObjective = std::sqrt(variance / static_cast<double>(reps));
        }
        const double cells = static_cast<double>(envs.size() * reps);
        if (referenceCosts) summary.meanGap = gapTotal / cells;
        summary.meanTransitions = transitionTotal / cells;
        outcome.summary.push_back(std::move(summary));
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Job-shop benchmark directories
// ---------------------------------------------------------------------------

/**
 * @brief Decode every job-shop file in a directory (sorted by filename) and
 *        report gaps against a best-known cost table keyed by file stem.
 */
template <typename P>
std::vector<ResultRow> evaluateJobShopDir(const std::filesystem::path& dir, const P& policy,
                                          Strategy strategy, const StrategySettings& settings,
                                          const std::map<std::string, double>& bestKnown,
                                          std::uint64_t seed, int workers = 1) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no instance files in " + dir.string());

    std::vector<JsspEnv> envs;
    envs.reserve(files.size());
    for (const auto& file : files) envs.emplace_back(readJobShopText(file));

    std::vector<ResultRow> rows(files.size());
    const RngStream base(seed);
    parallelFor(files.size(), static_cast<unsigned>(std::max(workers, 1)), [&](std::size_t i) {
        RngStream rng = base.derive(i);
        const auto start = std::chrono::steady_clock::now();
        const StrategyRun run = runStrategy(strategy, envs[i], policy, settings, rng);
        const auto stop = std::chrono::steady_clock::now();
        ResultRow& row = rows[i];
        row.instanceId = files[i].stem().string();
        row.strategy = strategyName(strategy);
        row.bestObjective = run.best.objective;
        if (const auto it = bestKnown.find(row.instanceId); it != bestKnown.end())
            row.gap = gapPercent(run.best.objective, it->second);
        row.wallTimeMs = std::chrono::duration<double, std::milli>(stop - start).count();
        row.transitions = run.transitions;
        row.seed = seed;
    });
    return rows;
}

} // namespace rebeam
