/**
 * @file io.hpp
 * @brief File formats: JSON-lines instance sets (bit-exact double
 *        round-trips), versioned policy checkpoints, the classic job-shop
 *        benchmark text format, best-known-value tables, and a CSV writer
 *        with RFC-4180 quoting.
 */

#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rebeam/cvrp.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/policy.hpp"
#include "rebeam/tsp.hpp"

namespace rebeam {

/// A file could not be read, written, or understood.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Instance serialization
// ---------------------------------------------------------------------------

inline Json toJson(const Point& p) { return Json::array({p.x, p.y}); }

inline Point pointFromJson(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw IoError("point must be a [x, y] array");
    return Point{j[0].get<double>(), j[1].get<double>()};
}

inline Json toJson(const TspInstance& instance) {
    Json coords = Json::array();
    for (const Point& p : instance.coords) coords.push_back(toJson(p));
    return Json{{"type", "tsp"}, {"coords", std::move(coords)}};
}

inline Json toJson(const CvrpInstance& instance) {
    Json coords = Json::array();
    for (const Point& p : instance.coords) coords.push_back(toJson(p));
    return Json{{"type", "cvrp"},
                {"depot", toJson(instance.depot)},
                {"coords", std::move(coords)},
                {"demands", instance.demands},
                {"capacity", instance.capacity}};
}

inline Json toJson(const JsspInstance& instance) {
    return Json{{"type", "jssp"},
                {"jobs", instance.jobs},
                {"machines", instance.machines},
                {"procTimes", instance.procTimes},
                {"machineOrder", instance.machineOrder}};
}

namespace detail {
inline void requireType(const Json& j, const char* expected) {
    if (!j.is_object() || !j.contains("type") || j.at("type") != expected)
        throw IoError(std::string("expected an instance of type '") + expected + "'");
}
} // namespace detail

template <typename Inst>
Inst instanceFromJson(const Json& j);

template <>
inline TspInstance instanceFromJson<TspInstance>(const Json& j) {
    detail::requireType(j, "tsp");
    TspInstance instance;
    for (const Json& p : j.at("coords")) instance.coords.push_back(pointFromJson(p));
    return instance;
}

template <>
inline CvrpInstance instanceFromJson<CvrpInstance>(const Json& j) {
    detail::requireType(j, "cvrp");
    CvrpInstance instance;
    instance.depot = pointFromJson(j.at("depot"));
    for (const Json& p : j.at("coords")) instance.coords.push_back(pointFromJson(p));
    instance.demands = j.at("demands").get<std::vector<double>>();
    instance.capacity = j.at("capacity").get<double>();
    return instance;
}

template <>
inline JsspInstance instanceFromJson<JsspInstance>(const Json& j) {
    detail::requireType(j, "jssp");
    JsspInstance instance;
    instance.jobs = j.at("jobs").get<int>();
    instance.machines = j.at("machines").get<int>();
    instance.procTimes = j.at("procTimes").get<std::vector<std::vector<int>>>();
    instance.machineOrder = j.at("machineOrder").get<std::vector<std::vector<int>>>();
    validateInstance(instance);
    return instance;
}

/// One compact JSON object per line. Doubles round-trip bit-exactly.
template <typename Inst>
void writeJsonl(const std::filesystem::path& path, const std::vector<Inst>& instances) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    for (const Inst& instance : instances) out << toJson(instance).dump() << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

template <typename Inst>
std::vector<Inst> readJsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::vector<Inst> instances;
    std::string line;
    std::size_t lineNumber = 0;
    while (std::getline(in, line)) {
        ++lineNumber;
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw IoError(path.string() + ":" + std::to_string(lineNumber) + ": malformed JSON");
        try {
            instances.push_back(instanceFromJson<Inst>(j));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(lineNumber) + ": " + e.what());
        }
    }
    return instances;
}

// ---------------------------------------------------------------------------
// Policy checkpoints
// ---------------------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

/// Versioned JSON checkpoint carrying the feature-map identity so a file
/// can never be loaded into a policy with a different feature layout.
template <typename FeatureMap>
void writeCheckpoint(const std::filesystem::path& path,
                     const FeaturizedSoftmaxPolicy<FeatureMap>& policy, Json meta = Json::object()) {
    Json j{{"format", "rebeam-checkpoint"},
           {"version", kCheckpointVersion},
           {"featureMap", FeaturizedSoftmaxPolicy<FeatureMap>::featureMapId()},
           {"dim", FeatureMap::dim},
           {"theta", policy.theta()},
           {"meta", std::move(meta)}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

template <typename FeatureMap>
FeaturizedSoftmaxPolicy<FeatureMap> readCheckpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw IoError(path.string() + ": malformed JSON");
    if (!j.is_object() || j.value("format", "") != "rebeam-checkpoint")
        throw IoError(path.string() + ": not a policy checkpoint");
    if (j.value("version", -1) != kCheckpointVersion)
        throw IoError(path.string() + ": unsupported checkpoint version");
    const std::string expected = FeaturizedSoftmaxPolicy<FeatureMap>::featureMapId();
    const std::string actual = j.value("featureMap", "");
    if (actual != expected)
        throw IoError(path.string() + ": checkpoint is for feature map '" + actual +
                      "', expected '" + expected + "'");
    auto theta = j.at("theta").get<std::vector<double>>();
    if (static_cast<int>(theta.size()) != FeatureMap::dim)
        throw IoError(path.string() + ": theta has wrong dimension");
    return FeaturizedSoftmaxPolicy<FeatureMap>(std::move(theta));
}

// ---------------------------------------------------------------------------
// Classic job-shop benchmark text format
// ---------------------------------------------------------------------------

/**
 * @brief Read the whitespace-delimited job-shop format: a "jobs machines"
 *        pair, then jobs x machines processing times, then jobs x machines
 *        one-based machine ids. Blank lines and arbitrary spacing are fine.
 */
inline JsspInstance readJobShopText(std::istream& in, const std::string& origin = "<stream>") {
    auto nextInt = [&](const char* what) {
        long long v = 0;
        if (!(in >> v)) throw IoError(origin + ": expected " + std::string(what));
        return v;
    };
    JsspInstance instance;
    instance.jobs = static_cast<int>(nextInt("job count"));
    instance.machines = static_cast<int>(nextInt("machine count"));
    if (instance.jobs < 1 || instance.machines < 1 || instance.jobs > 10000 ||
        instance.machines > 10000)
        throw IoError(origin + ": implausible size header");

    instance.procTimes.assign(static_cast<std::size_t>(instance.jobs),
                              std::vector<int>(static_cast<std::size_t>(instance.machines)));
    for (auto& row : instance.procTimes)
        for (int& v : row) v = static_cast<int>(nextInt("processing time"));

    instance.machineOrder.assign(static_cast<std::size_t>(instance.jobs),
                                 std::vector<int>(static_cast<std::size_t>(instance.machines)));
    for (auto& row : instance.machineOrder)
        for (int& v : row) v = static_cast<int>(nextInt("machine id")) - 1;  // file is one-based

    try {
        validateInstance(instance);
    } catch (const std::exception& e) {
        throw IoError(origin + ": " + e.what());
    }
    return instance;
}

inline JsspInstance readJobShopText(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    return readJobShopText(in, path.string());
}

/// Inverse of readJobShopText; machine ids are written one-based.
inline void writeJobShopText(std::ostream& os, const JsspInstance& instance) {
    os << instance.jobs << ' ' << instance.machines << '\n';
    for (const auto& row : instance.procTimes) {
        for (std::size_t o = 0; o < row.size(); ++o) os << (o ? " " : "") << row[o];
        os << '\n';
    }
    for (const auto& row : instance.machineOrder) {
        for (std::size_t o = 0; o < row.size(); ++o) os << (o ? " " : "") << row[o] + 1;
        os << '\n';
    }
}

inline void writeJobShopText(const std::filesystem::path& path, const JsspInstance& instance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    writeJobShopText(out, instance);
    if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Best-known values and CSV output
// ---------------------------------------------------------------------------

/**
 * @brief Read a "name,value" table of best-known objective costs. A header
 *        row is skipped when its second field is not numeric.
 */
inline std::map<std::string, double> readBestKnownCsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::map<std::string, double> best;
    std::string line;
    std::size_t lineNumber = 0;
    while (std::getline(in, line)) {
        ++lineNumber;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError(path.string() + ":" + std::to_string(lineNumber) + ": expected name,value");
        const std::string name = line.substr(0, comma);
        const std::string valueText = line.substr(comma + 1);
        double value = 0.0;
        const auto* begin = valueText.data();
        const auto* end = valueText.data() + valueText.size();
        const auto parsed = std::from_chars(begin, end, value);
        if (parsed.ec != std::errc{} || parsed.ptr != end) {
            if (lineNumber == 1) continue;  // header row
            throw IoError(path.string() + ":" + std::to_string(lineNumber) +
                          ": malformed value '" + valueText + "'");
        }
        best[name] = value;
    }
    return best;
}

/// Shortest decimal form that parses back to exactly the same double.
inline std::string formatDouble(double value) {
    char buffer[40];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

/// Quote a field per RFC 4180 when it contains a comma, quote, or newline.
inline std::string csvEscape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

/// Newline-delimited rows with RFC-4180 field quoting.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void writeRow(std::span<const std::string> fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) os_ << ',';
            os_ << csvEscape(fields[i]);
        }
        os_ << '\n';
    }

    void writeRow(std::initializer_list<std::string> fields) {
        writeRow(std::span<const std::string>(fields.begin(), fields.size()));
    }

private:
    std::ostream& os_;
};

} // namespace rebeam
