/**
 * @file sil.hpp
 * @brief Self-improvement training: decode pseudo-labels with the best
 *        policy snapshot, fit the live policy to them by next-decision
 *        cross-entropy, and gate snapshot replacement on a fixed greedy
 *        validation set with early stopping on stalled patience.
 */

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rebeam/decode.hpp"
#include "rebeam/io.hpp"
#include "rebeam/optim.hpp"
#include "rebeam/policy.hpp"

namespace rebeam {

struct EpochConfig {
    int instancesPerEpoch = 512;
    int batchesPerEpoch = 64;
    int batchSize = 64;
    DecodeConfig decodeConfig;  ///< how pseudo-labels are decoded
    double learningRate = 2e-4;
    double gradientClipNorm = 1.0;
    int patienceEpochs = 50;  ///< stop after this many epochs without improvement
    OptimizerKind optimizer = OptimizerKind::Adam;
    int workers = 1;  ///< parallel fan-out of the decode phase
};

template <typename E>
struct LabeledInstance {
    E env;
    Solution label;
};

/// One epoch's training data: each instance paired with the best solution
/// its decode found. Replaced wholesale every epoch.
template <typename E>
using PseudoLabelSet = std::vector<LabeledInstance<E>>;

/**
 * @brief Decode a fresh batch of instances against a frozen policy snapshot.
 *
 * makeInstance(rng) -> environment builds one random instance. Pass a
 * stream derived once per epoch so no instance repeats across epochs.
 * Decodes fan out over `workers` threads; per-instance substreams keep the
 * result independent of the worker count.
 */
template <typename Gen, typename P>
auto generateEpochData(Gen&& makeInstance, int count, const P& snapshot,
                       const DecodeConfig& decodeConfig, const RngStream& epochRng,
                       int workers = 1) {
    using E = std::remove_cvref_t<std::invoke_result_t<Gen&, RngStream&>>;
    if (count < 1) throw ContractViolation("generateEpochData: count must be >= 1");

    PseudoLabelSet<E> data;
    data.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        RngStream genRng = epochRng.derive(static_cast<std::uint64_t>(2 * i));
        data.push_back({makeInstance(genRng), Solution{}});
    }

    DecodeConfig perInstance = decodeConfig;
    perInstance.recordRounds = false;
    perInstance.recordSamples = false;
    parallelFor(static_cast<std::size_t>(count), static_cast<unsigned>(std::max(workers, 1)),
                [&](std::size_t i) {
                    RngStream decodeRng =
                        epochRng.derive(static_cast<std::uint64_t>(2 * i + 1));
                    const DecodeResult result =
                        decode(data[i].env, snapshot, perInstance, decodeRng);
                    if (!result.best.feasible())
                        throw InfeasibleError("generateEpochData: decode produced no solution",
                                              result.best.decisions);
                    data[i].label = result.best;
                });
    return data;
}

struct EpochTrainStats {
    std::vector<double> batchLoss;
    double meanLoss = 0.0;
    double maxGradientNorm = 0.0;  ///< before clipping
};

/**
 * @brief One epoch of cross-entropy fitting.
 *
 * Each batch draws batchSize (instance, label) pairs with replacement and a
 * uniform cut depth in {0, ..., n-1} per pair, then applies one clipped
 * gradient step. A non-finite loss aborts with diagnostics.
 */
template <typename FeatureMap, typename E>
EpochTrainStats trainEpoch(FeaturizedSoftmaxPolicy<FeatureMap>& policy, Optimizer& optimizer,
                           const PseudoLabelSet<E>& labels, const EpochConfig& config,
                           RngStream& rng) {
    if (labels.empty()) throw ContractViolation("trainEpoch: empty pseudo-label set");
    if (config.batchSize < 1 || config.batchesPerEpoch < 1)
        throw ContractViolation("trainEpoch: batch shape must be positive");

    EpochTrainStats stats;
    stats.batchLoss.reserve(static_cast<std::size_t>(config.batchesPerEpoch));
    for (int b = 0; b < config.batchesPerEpoch; ++b) {
        std::vector<LabeledCut<E>> batch;
        batch.reserve(static_cast<std::size_t>(config.batchSize));
        for (int j = 0; j < config.batchSize; ++j) {
            const auto& pair = labels[rng.below(labels.size())];
            const int n = pair.env.solutionLength();
            batch.push_back({&pair.env, &pair.label,
                             static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))});
        }
        auto [loss, gradient] =
            lossAndGradient(policy, std::span<const LabeledCut<E>>(batch));
        if (!std::isfinite(loss))
            throw std::runtime_error(
                "trainEpoch: non-finite loss at batch " + std::to_string(b) +
                " (theta norm " + std::to_string(globalNorm(policy.theta())) + ")");
        stats.maxGradientNorm =
            std::max(stats.maxGradientNorm, clipGlobalNorm(gradient, config.gradientClipNorm));
        optimizer.step(policy.theta(), gradient);
        stats.batchLoss.push_back(loss);
    }
    for (double l : stats.batchLoss) stats.meanLoss += l;
    stats.meanLoss /= static_cast<double>(stats.batchLoss.size());
    return stats;
}

/// Mean greedy-rollout objective over a fixed instance set (deterministic).
template <typename E, typename P>
double meanGreedyObjective(const std::vector<E>& instances, const P& policy) {
    if (instances.empty()) throw ContractViolation("meanGreedyObjective: empty instance set");
    double total = 0.0;
    RngStream unused(0);  // greedy rollouts draw nothing
    for (const E& env : instances)
        total += rollout(env, policy, RolloutMode::Greedy, unused).objective;
    return total / static_cast<double>(instances.size());
}

/// Live policy, its gated best snapshot, and the gate's bookkeeping.
template <typename FeatureMap>
struct TrainState {
    FeaturizedSoftmaxPolicy<FeatureMap> policy;    ///< actively trained parameters
    FeaturizedSoftmaxPolicy<FeatureMap> snapshot;  ///< best-so-far; decodes pseudo-labels
    Optimizer optimizer;
    double bestValidationScore = kNegInf;  ///< snapshot's recorded mean objective
    double lastValidationScore = kNegInf;
    int patience = 0;
    bool stopped = false;
};

/// Record the snapshot's own validation score before training begins, so an
/// untrained epoch that merely ties it never counts as an improvement.
template <typename FeatureMap, typename E>
void initializeGate(TrainState<FeatureMap>& state, const std::vector<E>& validation) {
    state.bestValidationScore = meanGreedyObjective(validation, state.snapshot);
    state.lastValidationScore = state.bestValidationScore;
    state.patience = 0;
    state.stopped = false;
}

/**
 * @brief Greedy-validate the live policy and gate the snapshot on strict
 *        improvement of the mean objective. Ties and regressions burn
 *        patience; exhausting it stops the run.
 *
 * Returns true when the snapshot was replaced.
 */
template <typename FeatureMap, typename E>
bool validateAndGate(TrainState<FeatureMap>& state, const std::vector<E>& validation,
                     int patienceEpochs) {
    const double score = meanGreedyObjective(validation, state.policy);
    state.lastValidationScore = score;
    if (score > state.bestValidationScore) {
        state.bestValidationScore = score;
        state.snapshot = state.policy;
        state.patience = 0;
        return true;
    }
    ++state.patience;
    if (state.patience >= patienceEpochs) state.stopped = true;
    return false;
}

struct SilRunConfig {
    EpochConfig epoch;
    int maxEpochs = 30;
    int validationInstances = 64;
    std::uint64_t seed = 0;
    std::filesystem::path runDir;  ///< empty: keep everything in memory
};

struct SilEpochRecord {
    int epoch = 0;
    double meanLabelObjective = 0.0;
    double meanLoss = 0.0;
    double validationScore = 0.0;
    double bestValidationScore = 0.0;
    int patience = 0;
    bool improved = false;
};

struct SilRunResult {
    std::vector<SilEpochRecord> history;
    double initialValidationScore = 0.0;  ///< snapshot score before any training
    double finalValidationScore = 0.0;    ///< snapshot score when the run ended
    int epochsRun = 0;
    bool earlyStopped = false;
};

namespace detail {

inline Json toJson(const DecodeConfig& c) {
    return Json{{"k", c.k},       {"s", c.s},
                {"topP", c.topP}, {"temperature", c.temperature},
                {"seed", c.seed}, {"countTransitions", c.countTransitions}};
}

inline Json toJson(const EpochConfig& c) {
    return Json{{"instancesPerEpoch", c.instancesPerEpoch},
                {"batchesPerEpoch", c.batchesPerEpoch},
                {"batchSize", c.batchSize},
                {"decode", toJson(c.decodeConfig)},
                {"learningRate", c.learningRate},
                {"gradientClipNorm", c.gradientClipNorm},
                {"patienceEpochs", c.patienceEpochs},
                {"optimizer", c.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
                {"workers", c.workers}};
}

} // namespace detail

/**
 * @brief The full training cycle: per epoch, decode a fresh pseudo-label
 *        set with the snapshot, fit the live policy to it, then gate.
 *
 * The caller's policy supplies the initial parameters and receives the
 * final gated snapshot on return. With a run directory set, the
 * configuration, per-epoch metrics, and both parameter vectors are written
 * there (config.json, metrics.csv, policy-current.json, policy-best.json).
 */
template <typename FeatureMap, typename Gen>
SilRunResult runSil(FeaturizedSoftmaxPolicy<FeatureMap>& policy, Gen&& makeInstance,
                    const SilRunConfig& config) {
    using E = std::remove_cvref_t<std::invoke_result_t<Gen&, RngStream&>>;
    if (config.maxEpochs < 1 || config.validationInstances < 1)
        throw ContractViolation("runSil: maxEpochs and validationInstances must be >= 1");

    const RngStream runRng(config.seed);

    std::vector<E> validation;
    validation.reserve(static_cast<std::size_t>(config.validationInstances));
    const RngStream validationRng = runRng.derive(0x76616c);
    for (int i = 0; i < config.validationInstances; ++i) {
        RngStream instanceRng = validationRng.derive(static_cast<std::uint64_t>(i));
        validation.push_back(makeInstance(instanceRng));
    }

    TrainState<FeatureMap> state{
        policy, policy, Optimizer(config.epoch.optimizer, config.epoch.learningRate)};
    initializeGate(state, validation);

    SilRunResult result;
    result.initialValidationScore = state.bestValidationScore;

    std::ofstream metrics;
    const bool persist = !config.runDir.empty();
    if (persist) {
        std::filesystem::create_directories(config.runDir);
        std::ofstream configOut(config.runDir / "config.json", std::ios::binary);
        configOut << Json{{"seed", config.seed},
                          {"maxEpochs", config.maxEpochs},
                          {"validationInstances", config.validationInstances},
                          {"featureMap", FeaturizedSoftmaxPolicy<FeatureMap>::featureMapId()},
                          {"epoch", detail::toJson(config.epoch)}}
                         .dump(2)
                  << '\n';
        metrics.open(config.runDir / "metrics.csv", std::ios::binary);
        CsvWriter(metrics).writeRow({"epoch", "meanLabelObjective", "meanLoss",
                                     "validationScore", "bestValidationScore", "patience",
                                     "improved"});
    }

    for (int epoch = 0; epoch < config.maxEpochs && !state.stopped; ++epoch) {
        const RngStream epochRng = runRng.derive(0x65706f63 + static_cast<std::uint64_t>(epoch));
        const auto labels =
            generateEpochData(makeInstance, config.epoch.instancesPerEpoch, state.snapshot,
                              config.epoch.decodeConfig, epochRng, config.epoch.workers);

        double meanLabelObjective = 0.0;
        for (const auto& pair : labels) meanLabelObjective += pair.label.objective;
        meanLabelObjective /= static_cast<double>(labels.size());

        RngStream trainRng = epochRng.derive(0x747261696e);
        const EpochTrainStats stats =
            trainEpoch(state.policy, state.optimizer, labels, config.epoch, trainRng);

        SilEpochRecord record;
        record.epoch = epoch;
        record.meanLabelObjective = meanLabelObjective;
        record.meanLoss = stats.meanLoss;
        record.improved = validateAndGate(state, validation, config.epoch.patienceEpochs);
        record.validationScore = state.lastValidationScore;
        record.bestValidationScore = state.bestValidationScore;
        record.patience = state.patience;
        result.history.push_back(record);
        ++result.epochsRun;

        if (persist) {
            CsvWriter(metrics).writeRow(
                {std::to_string(epoch), formatDouble(meanLabelObjective),
                 formatDouble(stats.meanLoss), formatDouble(record.validationScore),
                 formatDouble(record.bestValidationScore), std::to_string(record.patience),
                 record.improved ? "1" : "0"});
            writeCheckpoint(config.runDir / "policy-current.json", state.policy,
                            Json{{"epoch", epoch}});
            writeCheckpoint(config.runDir / "policy-best.json", state.snapshot,
                            Json{{"epoch", epoch},
                                 {"validationScore", state.bestValidationScore}});
        }
    }

    result.earlyStopped = state.stopped;
    result.finalValidationScore = state.bestValidationScore;
    policy = state.snapshot;
    return result;
}

} // namespace rebeam
