#include "ocp/scenario.hpp"

#include "ocp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ocp {

namespace {

constexpr std::uint64_t kStreamN1 = 1;
constexpr std::uint64_t kStreamN2 = 2;
constexpr std::uint64_t kStreamBrownian = 3;

// Poisson event times on (start, end]: draw the count, then order statistics
// of uniforms. The reflection end - u keeps times strictly above start.
std::vector<double> sample_event_times(std::mt19937_64& rng, double intensity,
                                       double start, double horizon) {
    std::vector<double> times;
    if (intensity <= 0.0) return times;
    std::poisson_distribution<long> count_dist(intensity * horizon);
    const long count = count_dist(rng);
    times.reserve(static_cast<std::size_t>(count));
    std::uniform_real_distribution<double> u(0.0, horizon);
    for (long k = 0; k < count; ++k) {
        times.push_back(start + horizon - u(rng));
    }
    std::sort(times.begin(), times.end());
    return times;
}

double sample_mark(std::mt19937_64& rng, const MarkDistribution& dist) {
    if (dist.kind == MarkKind::Constant) return dist.param;
    std::exponential_distribution<double> exp_dist(1.0 / dist.param);
    double z = exp_dist(rng);
    while (!(z > 0.0)) z = exp_dist(rng); // marks must be strictly positive
    return z;
}

} // namespace

ScenarioPath sample_scenario(const TimeGrid& grid, const LevySpec& spec, std::uint64_t seed) {
    spec.validate();

    auto rng_n1 = make_engine(derive_seed(seed, 0, kStreamN1));
    auto rng_n2 = make_engine(derive_seed(seed, 0, kStreamN2));
    auto rng_b = make_engine(derive_seed(seed, 0, kStreamBrownian));

    ScenarioPath path{grid, seed, {}, {}, {}, {}, {}, {}};

    path.n1.times = sample_event_times(rng_n1, spec.n1_intensity, grid.start(), grid.horizon());
    path.n1.marks.reserve(path.n1.times.size());
    for (std::size_t k = 0; k < path.n1.times.size(); ++k) {
        path.n1.marks.push_back(sample_mark(rng_n1, spec.n1_mark));
    }
    path.n2.times = sample_event_times(rng_n2, spec.n2_intensity, grid.start(), grid.horizon());

    // merged registry: grid nodes plus every jump instant
    const std::vector<double> nodes = grid.nodes();
    std::vector<double> merged;
    merged.reserve(nodes.size() + path.n1.times.size() + path.n2.times.size());
    merged.insert(merged.end(), nodes.begin(), nodes.end());
    merged.insert(merged.end(), path.n1.times.begin(), path.n1.times.end());
    merged.insert(merged.end(), path.n2.times.begin(), path.n2.times.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    path.times = std::move(merged);
    const std::size_t n = path.times.size();
    path.brownian.assign(n, 0.0);
    path.n1_mark.assign(n, 0.0);
    path.n2_hits.assign(n, 0);

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = path.times[i] - path.times[i - 1];
        path.brownian[i] = path.brownian[i - 1] + std::sqrt(dt) * gauss(rng_b);
    }

    // mark the event indices (exact: merged contains every jump time)
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < path.n1.times.size(); ++k) {
        while (path.times[cursor] < path.n1.times[k]) ++cursor;
        path.n1_mark[cursor] += path.n1.marks[k];
    }
    cursor = 0;
    for (double t : path.n2.times) {
        while (path.times[cursor] < t) ++cursor;
        path.n2_hits[cursor] += 1;
    }
    return path;
}

std::size_t ScenarioPath::index_at(double t) const {
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(times.begin(), times.end(), t);
    double best_gap = std::numeric_limits<double>::infinity();
    std::size_t best = times.size();
    if (it != times.end()) {
        best_gap = std::abs(*it - t);
        best = static_cast<std::size_t>(it - times.begin());
    }
    if (it != times.begin()) {
        const double gap = std::abs(*(it - 1) - t);
        if (gap < best_gap) {
            best_gap = gap;
            best = static_cast<std::size_t>(it - times.begin()) - 1;
        }
    }
    if (best >= times.size() || best_gap > tol) throw unsampled_time(t);
    return best;
}

double brownian_increment(const ScenarioPath& path, double s, double t) {
    if (s > t) throw std::invalid_argument("brownian_increment: s must be <= t");
    return path.brownian[path.index_at(t)] - path.brownian[path.index_at(s)];
}

} // namespace ocp
