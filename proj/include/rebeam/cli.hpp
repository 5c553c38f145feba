/**
 * @file cli.hpp
 * @brief Command-line front end: generate instance files, decode them with
 *        any strategy, run self-improvement training, sweep equal-budget
 *        comparisons over (k, s) grids, and evaluate job-shop benchmark
 *        directories against best-known costs.
 */

#pragma once

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rebeam/features.hpp"
#include "rebeam/generate.hpp"
#include "rebeam/harness.hpp"
#include "rebeam/sil.hpp"

namespace rebeam {

namespace cli_detail {

inline std::vector<std::string> splitList(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            parts.push_back(current);
            current.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

inline std::vector<int> parseIntList(const std::string& text, const char* flag) {
    std::vector<int> values;
    for (const std::string& part : splitList(text)) {
        int v = 0;
        const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
        if (part.empty() || r.ec != std::errc{} || r.ptr != part.data() + part.size())
            throw IoError(std::string(flag) + ": expected a comma-separated integer list, got '" +
                          text + "'");
        values.push_back(v);
    }
    return values;
}

inline std::vector<double> parseDoubleList(const std::string& text, const char* flag) {
    std::vector<double> values;
    for (const std::string& part : splitList(text)) {
        char* end = nullptr;
        const double v = std::strtod(part.c_str(), &end);
        if (part.empty() || end != part.c_str() + part.size())
            throw IoError(std::string(flag) + ": expected a comma-separated number list, got '" +
                          text + "'");
        values.push_back(v);
    }
    return values;
}

enum class ProblemKind { Tsp, Cvrp, Jssp };

inline ProblemKind problemFromName(const std::string& name) {
    if (name == "tsp") return ProblemKind::Tsp;
    if (name == "cvrp") return ProblemKind::Cvrp;
    if (name == "jssp") return ProblemKind::Jssp;
    throw IoError("unknown problem '" + name + "'");
}

inline std::ofstream openOutput(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

/// Initial parameters: a checkpoint file, an inline vector, or zeros.
struct PolicyArgs {
    std::string checkpoint;
    std::string theta;
};

template <typename FeatureMap>
FeaturizedSoftmaxPolicy<FeatureMap> makePolicy(const PolicyArgs& args) {
    if (!args.checkpoint.empty() && !args.theta.empty())
        throw IoError("pass either --checkpoint or --theta, not both");
    if (!args.checkpoint.empty()) return readCheckpoint<FeatureMap>(args.checkpoint);
    if (!args.theta.empty()) {
        auto theta = parseDoubleList(args.theta, "--theta");
        if (static_cast<int>(theta.size()) != FeatureMap::dim)
            throw IoError("--theta: this problem's policy takes " +
                          std::to_string(FeatureMap::dim) + " values, got " +
                          std::to_string(theta.size()));
        return FeaturizedSoftmaxPolicy<FeatureMap>(std::move(theta));
    }
    return {};
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string problem = "tsp";
    int n = 10;
    int jobs = 6;
    int machines = 6;
    double capacity = 0.0;  ///< 0: the generator's size-based default
    int count = 100;
    std::uint64_t seed = 0;
    std::string out;
};

inline void runGenerate(const GenerateArgs& args) {
    RngStream rng(args.seed);
    std::size_t written = 0;
    switch (problemFromName(args.problem)) {
        case ProblemKind::Tsp: {
            std::vector<TspInstance> instances;
            for (int i = 0; i < args.count; ++i) instances.push_back(generateTsp(args.n, rng));
            writeJsonl(args.out, instances);
            written = instances.size();
            break;
        }
        case ProblemKind::Cvrp: {
            std::vector<CvrpInstance> instances;
            for (int i = 0; i < args.count; ++i)
                instances.push_back(generateCvrp(args.n, rng, args.capacity));
            writeJsonl(args.out, instances);
            written = instances.size();
            break;
        }
        case ProblemKind::Jssp: {
            std::vector<JsspInstance> instances;
            for (int i = 0; i < args.count; ++i)
                instances.push_back(generateJssp(args.jobs, args.machines, rng));
            writeJsonl(args.out, instances);
            written = instances.size();
            break;
        }
    }
    std::cout << "wrote " << written << " instances to " << args.out << '\n';
}

// ---------------------------------------------------------------------------
// decode
// ---------------------------------------------------------------------------

struct DecodeArgs {
    std::string problem = "tsp";
    std::string instances;
    std::string strategy = "step-reconsider";
    int k = 16;
    int s = 1;
    double topP = 1.0;
    double temperature = 1.0;
    bool budgetEqualized = true;
    std::uint64_t seed = 0;
    std::string out;
    std::string trace;
    int workers = static_cast<int>(defaultWorkerCount());
    bool noTiming = false;
    PolicyArgs policy;
};

template <typename Env, typename Inst, typename FeatureMap>
void runDecodeFor(const DecodeArgs& args) {
    const auto instances = readJsonl<Inst>(args.instances);
    if (instances.empty()) throw IoError("no instances in " + args.instances);
    const auto policy = makePolicy<FeatureMap>(args.policy);
    const Strategy strategy = strategyFromName(args.strategy);
    if (!args.trace.empty() && strategy != Strategy::StepReconsider)
        throw IoError("--trace requires --strategy step-reconsider");

    std::vector<Env> envs;
    envs.reserve(instances.size());
    for (const Inst& instance : instances) envs.emplace_back(instance);

    StrategySettings settings;
    settings.k = args.k;
    settings.s = args.s;
    settings.topP = args.topP;
    settings.temperature = args.temperature;
    settings.budgetEqualized = args.budgetEqualized;

    struct TraceRow {
        int round;
        int rootDepth;
        double best;
    };
    std::vector<ResultRow> rows(envs.size());
    std::vector<std::vector<TraceRow>> traces(envs.size());
    const bool wantTrace = !args.trace.empty();
    const RngStream base(args.seed);

    parallelFor(envs.size(), static_cast<unsigned>(std::max(args.workers, 1)),
                [&](std::size_t i) {
                    RngStream rng = base.derive(i);
                    const auto start = std::chrono::steady_clock::now();
                    StrategyRun run;
                    if (wantTrace) {
                        DecodeConfig config;
                        config.k = settings.k;
                        config.s = std::min(settings.s, envs[i].solutionLength());
                        config.topP = settings.topP;
                        config.temperature = settings.temperature;
                        const DecodeResult result = decode(envs[i], policy, config, rng);
                        run.best = result.best;
                        run.transitions = result.transitionsUsed;
                        for (std::size_t r = 0; r < result.perRoundBest.size(); ++r)
                            traces[i].push_back({static_cast<int>(r),
                                                 result.perRoundRootDepth[r],
                                                 result.perRoundBest[r]});
                    } else {
                        run = runStrategy(strategy, envs[i], policy, settings, rng);
                    }
                    const auto stop = std::chrono::steady_clock::now();
                    rows[i].instanceId = std::to_string(i);
                    rows[i].strategy = strategyName(strategy);
                    rows[i].bestObjective = run.best.objective;
                    rows[i].wallTimeMs =
                        std::chrono::duration<double, std::milli>(stop - start).count();
                    rows[i].transitions = run.transitions;
                    rows[i].seed = args.seed;
                });

    auto out = openOutput(args.out);
    writeResultsCsv(out, rows, !args.noTiming);
    if (wantTrace) {
        auto traceOut = openOutput(args.trace);
        CsvWriter csv(traceOut);
        csv.writeRow({"instanceId", "round", "rootDepth", "bestObjective"});
        for (std::size_t i = 0; i < traces.size(); ++i)
            for (const TraceRow& t : traces[i])
                csv.writeRow({std::to_string(i), std::to_string(t.round),
                              std::to_string(t.rootDepth), formatDouble(t.best)});
    }
    std::cout << "decoded " << envs.size() << " instances with " << strategyName(strategy)
              << ", results in " << args.out << '\n';
}

inline void runDecode(const DecodeArgs& args) {
    switch (problemFromName(args.problem)) {
        case ProblemKind::Tsp: runDecodeFor<TspEnv, TspInstance, TspFeatures>(args); break;
        case ProblemKind::Cvrp: runDecodeFor<CvrpEnv, CvrpInstance, CvrpFeatures>(args); break;
        case ProblemKind::Jssp: runDecodeFor<JsspEnv, JsspInstance, JsspFeatures>(args); break;
    }
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string problem = "tsp";
    int n = 10;
    int jobs = 6;
    int machines = 6;
    double capacity = 0.0;
    int maxEpochs = 30;
    int instancesPerEpoch = 512;
    int batchesPerEpoch = 64;
    int batchSize = 64;
    int k = 16;
    int s = 2;
    double topP = 1.0;
    double learningRate = 2e-4;
    double clipNorm = 1.0;
    int patience = 50;
    std::string optimizer = "adam";
    int validationInstances = 64;
    std::uint64_t seed = 0;
    std::string runDir;
    int workers = static_cast<int>(defaultWorkerCount());
    PolicyArgs policy;
};

template <typename FeatureMap, typename Gen>
void runTrainFor(const TrainArgs& args, Gen&& makeInstance) {
    SilRunConfig config;
    config.epoch.instancesPerEpoch = args.instancesPerEpoch;
    config.epoch.batchesPerEpoch = args.batchesPerEpoch;
    config.epoch.batchSize = args.batchSize;
    config.epoch.decodeConfig.k = args.k;
    config.epoch.decodeConfig.s = args.s;
    config.epoch.decodeConfig.topP = args.topP;
    config.epoch.learningRate = args.learningRate;
    config.epoch.gradientClipNorm = args.clipNorm;
    config.epoch.patienceEpochs = args.patience;
    if (args.optimizer == "adam")
        config.epoch.optimizer = OptimizerKind::Adam;
    else if (args.optimizer == "sgd")
        config.epoch.optimizer = OptimizerKind::Sgd;
    else
        throw IoError("unknown optimizer '" + args.optimizer + "' (use adam or sgd)");
    config.epoch.workers = std::max(args.workers, 1);
    config.maxEpochs = args.maxEpochs;
    config.validationInstances = args.validationInstances;
    config.seed = args.seed;
    config.runDir = args.runDir;

    auto policy = makePolicy<FeatureMap>(args.policy);
    const SilRunResult result = runSil(policy, makeInstance, config);
    std::cout << "epochs " << result.epochsRun << (result.earlyStopped ? " (early stop)" : "")
              << ", validation " << formatDouble(result.initialValidationScore) << " -> "
              << formatDouble(result.finalValidationScore) << ", artifacts in " << args.runDir
              << '\n';
}

inline void runTrain(const TrainArgs& args) {
    if (args.runDir.empty()) throw IoError("--run-dir is required");
    switch (problemFromName(args.problem)) {
        case ProblemKind::Tsp:
            runTrainFor<TspFeatures>(
                args, [&](RngStream& rng) { return TspEnv(generateTsp(args.n, rng)); });
            break;
        case ProblemKind::Cvrp:
            runTrainFor<CvrpFeatures>(args, [&](RngStream& rng) {
                return CvrpEnv(generateCvrp(args.n, rng, args.capacity));
            });
            break;
        case ProblemKind::Jssp:
            runTrainFor<JsspFeatures>(args, [&](RngStream& rng) {
                return JsspEnv(generateJssp(args.jobs, args.machines, rng));
            });
            break;
    }
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string problem = "tsp";
    std::string instances;  ///< JSONL path; empty: generate --count fresh ones
    int count = 100;
    std::uint64_t genSeed = 0;
    int n = 10;
    int jobs = 6;
    int machines = 6;
    double capacity = 0.0;
    std::string kList = "16";
    std::string sList = "1";
    std::string strategies = "step-reconsider,sbs-plain,iid-sampling";
    int repetitions = 1;
    bool budgetEqualized = true;
    double topP = 1.0;
    double temperature = 1.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string rowsOut;
    int workers = static_cast<int>(defaultWorkerCount());
    bool noTiming = false;
    PolicyArgs policy;
};

template <typename Env, typename Inst, typename FeatureMap>
void runCompareFor(const CompareArgs& args) {
    std::vector<Inst> instances;
    if (!args.instances.empty()) {
        instances = readJsonl<Inst>(args.instances);
    } else {
        RngStream rng(args.genSeed);
        for (int i = 0; i < args.count; ++i) {
            if constexpr (std::is_same_v<Inst, TspInstance>)
                instances.push_back(generateTsp(args.n, rng));
            else if constexpr (std::is_same_v<Inst, CvrpInstance>)
                instances.push_back(generateCvrp(args.n, rng, args.capacity));
            else
                instances.push_back(generateJssp(args.jobs, args.machines, rng));
        }
    }
    if (instances.empty()) throw IoError("no instances to compare on");

    std::vector<Env> envs;
    envs.reserve(instances.size());
    for (const Inst& instance : instances) envs.emplace_back(instance);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < envs.size(); ++i) {
        std::string id = std::to_string(i);
        ids.push_back(std::string(id.size() < 4 ? 4 - id.size() : 0, '0') + id);
    }

    const auto policy = makePolicy<FeatureMap>(args.policy);
    CompareConfig config;
    config.strategies.clear();
    for (const std::string& name : splitList(args.strategies))
        config.strategies.push_back(strategyFromName(name));
    config.repetitions = args.repetitions;
    config.seed = args.seed;
    config.workers = std::max(args.workers, 1);
    config.settings.topP = args.topP;
    config.settings.temperature = args.temperature;
    config.settings.budgetEqualized = args.budgetEqualized;

    auto out = openOutput(args.out);
    CsvWriter summary(out);
    summary.writeRow({"k", "s", "strategy", "meanBestObjective", "stderrBestObjective",
                      "meanTransitions"});
    std::ofstream rowsFile;
    const bool wantRows = !args.rowsOut.empty();
    if (wantRows) {
        rowsFile = openOutput(args.rowsOut);
        CsvWriter(rowsFile).writeRow({"k", "s", "instanceId", "strategy", "bestObjective",
                                      "wallTimeMs", "transitions", "seed"});
    }

    for (int k : parseIntList(args.kList, "--k")) {
        for (int s : parseIntList(args.sList, "--s")) {
            config.settings.k = k;
            config.settings.s = s;
            const CompareOutcome outcome =
                compareStrategies(envs, policy, config, nullptr, &ids);
            for (const StrategySummary& row : outcome.summary)
                summary.writeRow({std::to_string(k), std::to_string(s), row.strategy,
                                  formatDouble(row.meanBestObjective),
                                  formatDouble(row.stderrBestObjective),
                                  formatDouble(row.meanTransitions)});
            if (wantRows) {
                CsvWriter csv(rowsFile);
                for (const ResultRow& row : outcome.rows)
                    csv.writeRow({std::to_string(k), std::to_string(s), row.instanceId,
                                  row.strategy, formatDouble(row.bestObjective),
                                  args.noTiming ? std::string{"0"}
                                                : formatDouble(row.wallTimeMs),
                                  std::to_string(row.transitions),
                                  std::to_string(row.seed)});
            }
        }
    }
    std::cout << "compared " << envs.size() << " instances, summary in " << args.out << '\n';
}

inline void runCompare(const CompareArgs& args) {
    switch (problemFromName(args.problem)) {
        case ProblemKind::Tsp: runCompareFor<TspEnv, TspInstance, TspFeatures>(args); break;
        case ProblemKind::Cvrp: runCompareFor<CvrpEnv, CvrpInstance, CvrpFeatures>(args); break;
        case ProblemKind::Jssp: runCompareFor<JsspEnv, JsspInstance, JsspFeatures>(args); break;
    }
}

// ---------------------------------------------------------------------------
// taillard
// ---------------------------------------------------------------------------

struct TaillardArgs {
    std::string dir;
    std::string bestKnown;
    std::string strategy = "step-reconsider";
    int k = 16;
    int s = 6;
    double topP = 1.0;
    double temperature = 1.0;
    bool budgetEqualized = true;
    std::uint64_t seed = 0;
    std::string out;
    int workers = static_cast<int>(defaultWorkerCount());
    bool noTiming = false;
    PolicyArgs policy;
};

inline void runTaillard(const TaillardArgs& args) {
    const auto policy = makePolicy<JsspFeatures>(args.policy);
    std::map<std::string, double> best;
    if (!args.bestKnown.empty()) best = readBestKnownCsv(args.bestKnown);

    StrategySettings settings;
    settings.k = args.k;
    settings.s = args.s;
    settings.topP = args.topP;
    settings.temperature = args.temperature;
    settings.budgetEqualized = args.budgetEqualized;

    const auto rows = evaluateJobShopDir(args.dir, policy, strategyFromName(args.strategy),
                                         settings, best, args.seed,
                                         std::max(args.workers, 1));
    auto out = openOutput(args.out);
    writeResultsCsv(out, rows, !args.noTiming);

    double gapTotal = 0.0;
    int gapCount = 0;
    for (const ResultRow& row : rows)
        if (row.gap) {
            gapTotal += *row.gap;
            ++gapCount;
        }
    std::cout << "evaluated " << rows.size() << " instances";
    if (gapCount > 0)
        std::cout << ", mean gap " << formatDouble(gapTotal / gapCount) << "% over " << gapCount;
    std::cout << ", results in " << args.out << '\n';
}

} // namespace cli_detail

/// Entry point. Returns the process exit code; parse errors and file
/// problems report on stderr and exit nonzero.
inline int runCli(int argc, char** argv) {
    CLI::App app{"Sequence decoding and training for routing and scheduling problems"};
    app.require_subcommand(1);

    using namespace cli_detail;

    auto addPolicyFlags = [](CLI::App* sub, PolicyArgs& policy) {
        sub->add_option("--checkpoint", policy.checkpoint, "Policy checkpoint JSON to load");
        sub->add_option("--theta", policy.theta,
                        "Inline policy weights as a comma-separated list (default: zeros)");
    };

    GenerateArgs generateArgs;
    auto* generate = app.add_subcommand("generate", "Write random instances as JSON lines");
    generate->add_option("--problem", generateArgs.problem, "tsp, cvrp, or jssp")
        ->check(CLI::IsMember({"tsp", "cvrp", "jssp"}));
    generate->add_option("--n", generateArgs.n, "Nodes (tsp) or customers (cvrp)");
    generate->add_option("--jobs", generateArgs.jobs, "Jobs (jssp)");
    generate->add_option("--machines", generateArgs.machines, "Machines (jssp)");
    generate->add_option("--capacity", generateArgs.capacity,
                         "Vehicle capacity (cvrp; 0 uses the size-based default)");
    generate->add_option("--count", generateArgs.count, "Instances to write")
        ->check(CLI::PositiveNumber);
    generate->add_option("--seed", generateArgs.seed, "Generator seed");
    generate->add_option("--out", generateArgs.out, "Output JSONL path")->required();
    generate->callback([&]() { runGenerate(generateArgs); });

    DecodeArgs decodeArgs;
    auto* decode = app.add_subcommand("decode", "Decode instances with one strategy");
    decode->add_option("--problem", decodeArgs.problem, "tsp, cvrp, or jssp")
        ->check(CLI::IsMember({"tsp", "cvrp", "jssp"}));
    decode->add_option("--instances", decodeArgs.instances, "Instance JSONL path")->required();
    decode->add_option("--strategy", decodeArgs.strategy,
                       "step-reconsider, sbs-plain, iid-sampling, greedy, or beam-search");
    decode->add_option("--k", decodeArgs.k, "Beam width")->check(CLI::PositiveNumber);
    decode->add_option("--s", decodeArgs.s, "Decisions committed per round")
        ->check(CLI::PositiveNumber);
    decode->add_option("--top-p", decodeArgs.topP, "Nucleus filter (1 = off)");
    decode->add_option("--temperature", decodeArgs.temperature, "Conditional temperature");
    decode->add_flag("--budget-equalized,!--no-budget-equalized", decodeArgs.budgetEqualized,
                     "Give single-round samplers the round-based decoder's budget");
    decode->add_option("--seed", decodeArgs.seed, "Sampling seed");
    decode->add_option("--out", decodeArgs.out, "Result CSV path")->required();
    decode->add_option("--trace", decodeArgs.trace,
                       "Per-round trace CSV (step-reconsider only)");
    decode->add_option("--workers", decodeArgs.workers, "Parallel instance decodes");
    decode->add_flag("--no-timing", decodeArgs.noTiming,
                     "Write 0 for wall time so reruns are byte-identical");
    addPolicyFlags(decode, decodeArgs.policy);
    decode->callback([&]() { runDecode(decodeArgs); });

    TrainArgs trainArgs;
    auto* train = app.add_subcommand("train", "Self-improvement training loop");
    train->add_option("--problem", trainArgs.problem, "tsp, cvrp, or jssp")
        ->check(CLI::IsMember({"tsp", "cvrp", "jssp"}));
    train->add_option("--n", trainArgs.n, "Nodes (tsp) or customers (cvrp)");
    train->add_option("--jobs", trainArgs.jobs, "Jobs (jssp)");
    train->add_option("--machines", trainArgs.machines, "Machines (jssp)");
    train->add_option("--capacity", trainArgs.capacity, "Vehicle capacity (cvrp)");
    train->add_option("--epochs", trainArgs.maxEpochs, "Maximum epochs")
        ->check(CLI::PositiveNumber);
    train->add_option("--instances-per-epoch", trainArgs.instancesPerEpoch,
                      "Fresh instances decoded per epoch")
        ->check(CLI::PositiveNumber);
    train->add_option("--batches", trainArgs.batchesPerEpoch, "Gradient steps per epoch")
        ->check(CLI::PositiveNumber);
    train->add_option("--batch-size", trainArgs.batchSize, "Pairs per batch")
        ->check(CLI::PositiveNumber);
    train->add_option("--k", trainArgs.k, "Pseudo-label beam width")
        ->check(CLI::PositiveNumber);
    train->add_option("--s", trainArgs.s, "Pseudo-label step size")->check(CLI::PositiveNumber);
    train->add_option("--top-p", trainArgs.topP, "Nucleus filter for pseudo-label decoding");
    train->add_option("--lr", trainArgs.learningRate, "Learning rate");
    train->add_option("--clip", trainArgs.clipNorm, "Gradient clip norm (<= 0 disables)");
    train->add_option("--patience", trainArgs.patience,
                      "Epochs without validation improvement before stopping")
        ->check(CLI::PositiveNumber);
    train->add_option("--optimizer", trainArgs.optimizer, "adam or sgd")
        ->check(CLI::IsMember({"adam", "sgd"}));
    train->add_option("--validation", trainArgs.validationInstances,
                      "Fixed validation instances")
        ->check(CLI::PositiveNumber);
    train->add_option("--seed", trainArgs.seed, "Run seed");
    train->add_option("--run-dir", trainArgs.runDir, "Directory for metrics and checkpoints")
        ->required();
    train->add_option("--workers", trainArgs.workers, "Parallel pseudo-label decodes");
    addPolicyFlags(train, trainArgs.policy);
    train->callback([&]() { runTrain(trainArgs); });

    CompareArgs compareArgs;
    auto* compare = app.add_subcommand(
        "compare", "Equal-budget strategy comparison over a (k, s) grid");
    compare->add_option("--problem", compareArgs.problem, "tsp, cvrp, or jssp")
        ->check(CLI::IsMember({"tsp", "cvrp", "jssp"}));
    compare->add_option("--instances", compareArgs.instances,
                        "Instance JSONL path (default: generate fresh ones)");
    compare->add_option("--count", compareArgs.count, "Instances to generate when no file")
        ->check(CLI::PositiveNumber);
    compare->add_option("--gen-seed", compareArgs.genSeed, "Seed for generated instances");
    compare->add_option("--n", compareArgs.n, "Nodes (tsp) or customers (cvrp)");
    compare->add_option("--jobs", compareArgs.jobs, "Jobs (jssp)");
    compare->add_option("--machines", compareArgs.machines, "Machines (jssp)");
    compare->add_option("--capacity", compareArgs.capacity, "Vehicle capacity (cvrp)");
    compare->add_option("--k", compareArgs.kList, "Beam widths, comma-separated");
    compare->add_option("--s", compareArgs.sList, "Step sizes, comma-separated");
    compare->add_option("--strategies", compareArgs.strategies,
                        "Comma-separated strategy names");
    compare->add_option("--reps", compareArgs.repetitions, "Sampling repetitions per instance")
        ->check(CLI::PositiveNumber);
    compare->add_flag("--budget-equalized,!--no-budget-equalized",
                      compareArgs.budgetEqualized,
                      "Give single-round samplers the round-based decoder's budget");
    compare->add_option("--top-p", compareArgs.topP, "Nucleus filter (1 = off)");
    compare->add_option("--temperature", compareArgs.temperature, "Conditional temperature");
    compare->add_option("--seed", compareArgs.seed, "Sampling seed");
    compare->add_option("--out", compareArgs.out, "Summary CSV path")->required();
    compare->add_option("--rows", compareArgs.rowsOut, "Optional per-repetition row CSV");
    compare->add_option("--workers", compareArgs.workers, "Parallel instances");
    compare->add_flag("--no-timing", compareArgs.noTiming,
                      "Write 0 for wall time so reruns are byte-identical");
    addPolicyFlags(compare, compareArgs.policy);
    compare->callback([&]() { runCompare(compareArgs); });

    TaillardArgs taillardArgs;
    auto* taillard = app.add_subcommand(
        "taillard", "Evaluate a policy on a directory of job-shop benchmark files");
    taillard->add_option("--dir", taillardArgs.dir, "Directory of job-shop text instances")
        ->required();
    taillard->add_option("--best-known", taillardArgs.bestKnown,
                         "name,value CSV of best-known makespans");
    taillard->add_option("--strategy", taillardArgs.strategy, "Decoding strategy");
    taillard->add_option("--k", taillardArgs.k, "Beam width")->check(CLI::PositiveNumber);
    taillard->add_option("--s", taillardArgs.s, "Decisions committed per round")
        ->check(CLI::PositiveNumber);
    taillard->add_option("--top-p", taillardArgs.topP, "Nucleus filter (1 = off)");
    taillard->add_option("--temperature", taillardArgs.temperature, "Conditional temperature");
    taillard->add_flag("--budget-equalized,!--no-budget-equalized",
                       taillardArgs.budgetEqualized,
                       "Give single-round samplers the round-based decoder's budget");
    taillard->add_option("--seed", taillardArgs.seed, "Sampling seed");
    taillard->add_option("--out", taillardArgs.out, "Result CSV path")->required();
    taillard->add_option("--workers", taillardArgs.workers, "Parallel instances");
    taillard->add_flag("--no-timing", taillardArgs.noTiming,
                       "Write 0 for wall time so reruns are byte-identical");
    addPolicyFlags(taillard, taillardArgs.policy);
    taillard->callback([&]() { runTaillard(taillardArgs); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace rebeam
