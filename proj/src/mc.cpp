#include "ocp/mc.hpp"

#include "ocp/numerics.hpp"
#include "ocp/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace ocp {

namespace {
constexpr std::uint64_t kStreamPath = 101;
}

std::uint64_t path_seed(std::uint64_t master_seed, long path_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(path_index), kStreamPath);
}

int mc_worker_count(long n_paths) {
    long workers = static_cast<long>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (const char* env = std::getenv("OCP_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && cap < workers) workers = cap;
    }
    if (workers > n_paths) workers = n_paths;
    return static_cast<int>(workers);
}

std::vector<double> mc_sample(const TimeGrid& grid, const LevySpec& spec, long n_paths,
                              std::uint64_t master_seed, const PathFunctional& fn) {
    if (n_paths < 1) throw std::invalid_argument("mc_sample: n_paths must be >= 1");
    std::vector<double> values(static_cast<std::size_t>(n_paths));
    std::atomic<long> bad_index{-1};

    auto run_range = [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
            const std::uint64_t seed = path_seed(master_seed, i);
            const ScenarioPath scenario = sample_scenario(grid, spec, seed);
            const double v = fn(scenario);
            values[static_cast<std::size_t>(i)] = v;
            if (!std::isfinite(v)) {
                long expected = bad_index.load();
                while ((expected < 0 || i < expected) &&
                       !bad_index.compare_exchange_weak(expected, i)) {
                }
            }
        }
    };

    const int workers = mc_worker_count(n_paths);
    if (workers <= 1) {
        run_range(0, n_paths);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        const long chunk = (n_paths + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const long begin = w * chunk;
            const long end = std::min(n_paths, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    const long bad = bad_index.load();
    if (bad >= 0) throw mc_error(bad, path_seed(master_seed, bad));
    return values;
}

McEstimate summarize_sample(const std::vector<double>& values, std::uint64_t seed,
                            double confidence) {
    const long n = static_cast<long>(values.size());
    if (n < 2) throw std::invalid_argument("summarize_sample: need at least 2 values");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("summarize_sample: confidence must lie in (0,1)");
    }
    const double mean = pairwise_sum(values) / static_cast<double>(n);
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
    const double se = std::sqrt(var / static_cast<double>(n));
    const double z = normal_quantile(0.5 * (1.0 + confidence));

    McEstimate est;
    est.mean = mean;
    est.std_error = se;
    est.ci_low = mean - z * se;
    est.ci_high = mean + z * se;
    est.n_paths = n;
    est.seed = seed;
    est.confidence = confidence;
    return est;
}

McEstimate mc_estimate(const TimeGrid& grid, const LevySpec& spec, long n_paths,
                       std::uint64_t master_seed, double confidence,
                       const PathFunctional& fn) {
    if (n_paths < 2) throw std::invalid_argument("mc_estimate: n_paths must be >= 2");
    const std::vector<double> values = mc_sample(grid, spec, n_paths, master_seed, fn);
    return summarize_sample(values, master_seed, confidence);
}

} // namespace ocp
