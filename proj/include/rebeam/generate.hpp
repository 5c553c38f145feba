/**
 * @file generate.hpp
 * @brief Seeded random instance generators for the three problem families.
 */

#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "rebeam/cvrp.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/tsp.hpp"

namespace rebeam {

/// Uniform point in the unit square.
inline Point randomPoint(RngStream& rng) {
    const double x = rng.uniform01();
    return {x, rng.uniform01()};
}

/// TSP instance with N node coordinates uniform in [0,1]^2.
inline TspInstance generateTsp(int n, RngStream& rng) {
    TspInstance instance;
    instance.coords.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) instance.coords.push_back(randomPoint(rng));
    return instance;
}

/// Vehicle capacity convention: 50/80/100 at the standard sizes 100/200/500,
/// otherwise ceil(N/2) unless overridden.
inline double defaultCvrpCapacity(int n) {
    switch (n) {
        case 100: return 50.0;
        case 200: return 80.0;
        case 500: return 100.0;
        default: return static_cast<double>((n + 1) / 2);
    }
}

/**
 * @brief CVRP instance: depot and N customer coordinates uniform in [0,1]^2,
 *        demands uniform on the integers {1,...,9}.
 *
 * Pass capacity <= 0 to use the size-based default.
 */
inline CvrpInstance generateCvrp(int n, RngStream& rng, double capacity = 0.0) {
    CvrpInstance instance;
    instance.depot = randomPoint(rng);
    instance.coords.reserve(static_cast<std::size_t>(n));
    instance.demands.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) instance.coords.push_back(randomPoint(rng));
    for (int i = 0; i < n; ++i)
        instance.demands.push_back(1.0 + static_cast<double>(rng.below(9)));
    instance.capacity = capacity > 0.0 ? capacity : defaultCvrpCapacity(n);
    return instance;
}

/// JSSP instance: integer processing times uniform on [1, 99] and an
/// independent uniform random machine permutation per job.
inline JsspInstance generateJssp(int jobs, int machines, RngStream& rng) {
    JsspInstance instance;
    instance.jobs = jobs;
    instance.machines = machines;
    instance.procTimes.assign(static_cast<std::size_t>(jobs),
                              std::vector<int>(static_cast<std::size_t>(machines)));
    instance.machineOrder.assign(static_cast<std::size_t>(jobs),
                                 std::vector<int>(static_cast<std::size_t>(machines)));
    for (int j = 0; j < jobs; ++j) {
        for (int m = 0; m < machines; ++m)
            instance.procTimes[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] =
                1 + static_cast<int>(rng.below(99));
        auto& order = instance.machineOrder[static_cast<std::size_t>(j)];
        std::iota(order.begin(), order.end(), 0);
        // Fisher-Yates with the stream's bounded draw keeps generation
        // reproducible across standard-library implementations.
        for (int m = machines - 1; m > 0; --m) {
            const int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(m + 1)));
            std::swap(order[static_cast<std::size_t>(m)], order[static_cast<std::size_t>(pick)]);
        }
    }
    return instance;
}

} // namespace rebeam
