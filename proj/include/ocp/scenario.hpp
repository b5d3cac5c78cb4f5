#pragma once

#include "ocp/levy.hpp"
#include "ocp/time_grid.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ocp {

struct unsampled_time : std::invalid_argument {
    explicit unsampled_time(double t)
        : std::invalid_argument("unsampled time: " + std::to_string(t)) {}
};

// Gain events: strictly increasing times in (start, end] with positive sizes.
struct MarkedJumpTrain {
    std::vector<double> times;
    std::vector<double> marks;
};

// Loss events: strictly increasing times in (start, end].
struct JumpTrain {
    std::vector<double> times;
};

// One joint realization of the Brownian path and the two jump trains,
// sampled on the union of the grid nodes and the jump instants. The three
// sources come from distinct deterministic sub-streams of `seed`, so they
// are independent and the whole object is a pure function of (inputs, seed).
struct ScenarioPath {
    TimeGrid grid;
    std::uint64_t seed = 0;

    std::vector<double> times;     // registered times, sorted, unique
    std::vector<double> brownian;  // B at each registered time, B(start) = 0
    std::vector<double> n1_mark;   // total gain-mark landing at this instant (0 if none)
    std::vector<int> n2_hits;      // number of loss events at this instant (0 if none)

    MarkedJumpTrain n1;
    JumpTrain n2;

    std::size_t size() const { return times.size(); }

    // Locates a registered time (grid node or jump instant); throws
    // unsampled_time otherwise. Times are matched with a small tolerance
    // because callers reconstruct node values in floating point.
    std::size_t index_at(double t) const;

    double brownian_at(double t) const { return brownian[index_at(t)]; }
};

ScenarioPath sample_scenario(const TimeGrid& grid, const LevySpec& spec, std::uint64_t seed);

// B(t) - B(s) for registered s <= t.
double brownian_increment(const ScenarioPath& path, double s, double t);

} // namespace ocp
