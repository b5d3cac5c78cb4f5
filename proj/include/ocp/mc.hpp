#pragma once

#include "ocp/scenario.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocp {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    double confidence = 0.95;
};

// Raised when a per-path functional returns a non-finite value; carries the
// offending path so the scenario can be replayed.
struct mc_error : std::runtime_error {
    long path_index;
    std::uint64_t path_seed;
    mc_error(long index, std::uint64_t seed)
        : std::runtime_error("non-finite path functional at path " + std::to_string(index) +
                             " (seed " + std::to_string(seed) + ")"),
          path_index(index), path_seed(seed) {}
};

using PathFunctional = std::function<double(const ScenarioPath&)>;

// Number of Monte Carlo workers: hardware concurrency capped by the
// OCP_THREADS environment variable. Worker count never changes results.
int mc_worker_count(long n_paths);

// Mean/stderr/CI of `fn` over independent scenarios. Path i runs on the
// scenario derived from (master_seed, i), and the reduction is a fixed-order
// pairwise sum, so the estimate is bit-stable under any worker schedule.
McEstimate mc_estimate(const TimeGrid& grid, const LevySpec& spec, long n_paths,
                       std::uint64_t master_seed, double confidence,
                       const PathFunctional& fn);

// Same contract for callers that want the whole sample.
std::vector<double> mc_sample(const TimeGrid& grid, const LevySpec& spec, long n_paths,
                              std::uint64_t master_seed, const PathFunctional& fn);

// Summary statistics of an externally produced sample (fixed order).
McEstimate summarize_sample(const std::vector<double>& values, std::uint64_t seed,
                            double confidence);

std::uint64_t path_seed(std::uint64_t master_seed, long path_index);

} // namespace ocp
