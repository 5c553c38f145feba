/**
 * @file common.hpp
 * @brief Shared primitives: decision indices, error types, seeded RNG streams
 *        and the log-space numeric helpers used throughout the library.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rebeam {

/// Index of one assignment for the next decision variable.
using DecisionIndex = std::int32_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// A precondition of an operation was violated by the caller.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// An exact method refused an input above its size guard.
class SizeLimitError : public std::runtime_error {
public:
    explicit SizeLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// A rollout reached a state with no feasible decision. Carries the partial
/// decision sequence built so far.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, std::vector<DecisionIndex> partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}

    const std::vector<DecisionIndex>& partial() const { return partial_; }

private:
    std::vector<DecisionIndex> partial_;
};

/// Every child of a node has zero residual mass.
class ExhaustedError : public std::runtime_error {
public:
    explicit ExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/**
 * @brief Seeded pseudo-random stream with deterministic substream derivation.
 *
 * Substreams derived from (seed, id) pairs make per-instance results
 * independent of worker scheduling.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed)
        : seed_(seed), engine_(detail::splitmix64(seed)) {}

    /// Independent stream for a keyed subtask (e.g. one instance of a batch).
    RngStream derive(std::uint64_t key) const {
        return RngStream(detail::splitmix64(seed_ ^ detail::splitmix64(key + 0x51ed2701ULL)));
    }

    /// Uniform draw in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    /// Standard Gumbel draw.
    double gumbel() { return -std::log(-std::log(uniform01())); }

    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 engine_;
};

/// log(exp(a) + exp(b)), stable.
inline double logAddExp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

/// log(1 - exp(x)) for x <= 0, stable near both ends.
inline double log1mExp(double x) {
    if (x >= 0.0) return kNegInf;
    if (x > -0.6931471805599453) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

/**
 * @brief log(exp(a) - exp(b)) with exhaustion clamping.
 *
 * When b >= a - 1e-12 the residual is treated as zero and the result is
 * negative infinity, preventing rounding from producing negative masses.
 */
inline double logSubExp(double a, double b) {
    if (b == kNegInf) return a;
    if (b >= a - 1e-12) return kNegInf;
    return a + log1mExp(b - a);
}

/// logsumexp over a vector of log values.
inline double logSumExp(const std::vector<double>& xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Run fn(i) for i in [0, count) on up to `workers` threads.
/// fn must be safe to call concurrently for distinct i.
template <typename Fn>
void parallelFor(std::size_t count, unsigned workers, Fn&& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex errorMutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(errorMutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Default worker count: REBEAM_WORKERS env var, else hardware concurrency.
inline unsigned defaultWorkerCount() {
    if (const char* env = std::getenv("REBEAM_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace rebeam
