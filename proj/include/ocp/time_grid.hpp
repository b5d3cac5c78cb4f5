#pragma once

#include <stdexcept>
#include <vector>

namespace ocp {

// Uniform planning grid on [start, start + horizon].
class TimeGrid {
public:
    TimeGrid(double start, double horizon, int n_steps)
        : start_(start), horizon_(horizon), n_steps_(n_steps) {
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
        for (int i = 0; i < n_steps; ++i) {
            if (!(node(i) < node(i + 1))) {
                throw std::invalid_argument("TimeGrid: nodes are not strictly increasing");
            }
        }
    }

    double start() const { return start_; }
    double horizon() const { return horizon_; }
    double end() const { return start_ + horizon_; }
    int n_steps() const { return n_steps_; }
    double dt() const { return horizon_ / n_steps_; }

    // node(0) == start and node(n_steps) == start + horizon exactly
    double node(int i) const {
        return start_ + horizon_ * (static_cast<double>(i) / n_steps_);
    }

    std::vector<double> nodes() const {
        std::vector<double> out(static_cast<std::size_t>(n_steps_) + 1);
        for (int i = 0; i <= n_steps_; ++i) out[static_cast<std::size_t>(i)] = node(i);
        return out;
    }

    bool operator==(const TimeGrid& other) const = default;

private:
    double start_;
    double horizon_;
    int n_steps_;
};

} // namespace ocp
