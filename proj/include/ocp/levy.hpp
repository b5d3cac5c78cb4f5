#pragma once

#include <stdexcept>
#include <string>

namespace ocp {

enum class MarkKind { Exponential, Constant };

// Jump-size distribution for the wage-gain train. Both choices have positive
// marks and a finite first moment, which the compensator calculus requires.
struct MarkDistribution {
    MarkKind kind = MarkKind::Exponential;
    double param = 0.2; // mean for Exponential, the fixed size for Constant

    static MarkDistribution exponential(double mean) { return {MarkKind::Exponential, mean}; }
    static MarkDistribution constant(double size) { return {MarkKind::Constant, size}; }

    double mean() const { return param; }

    bool operator==(const MarkDistribution&) const = default;
};

// Jump specification: a marked gain train (intensity, mark law) and an
// unmarked loss train (intensity only; every event retains fraction eps).
struct LevySpec {
    double n1_intensity = 0.0;  // events/year of the marked train
    MarkDistribution n1_mark{};
    double n2_intensity = 0.0;  // events/year of the unmarked train

    void validate() const {
        if (!(n1_intensity >= 0.0)) throw std::invalid_argument("LevySpec: n1_intensity must be >= 0");
        if (!(n2_intensity >= 0.0)) throw std::invalid_argument("LevySpec: n2_intensity must be >= 0");
        if (!(n1_mark.param > 0.0)) throw std::invalid_argument("LevySpec: mark parameter must be > 0");
    }

    bool operator==(const LevySpec&) const = default;
};

struct LevyMoments {
    double alpha; // intensity-weighted mean mark of the gain train
    double beta;  // total intensity of the loss train
};

inline LevyMoments levy_moments(const LevySpec& spec) {
    spec.validate();
    return {spec.n1_intensity * spec.n1_mark.mean(), spec.n2_intensity};
}

} // namespace ocp
