#pragma once

#include "ocp/levy.hpp"
#include "ocp/time_grid.hpp"

#include <stdexcept>

namespace ocp {

// All model constants. Rates are per year, times in years.
struct MarketParams {
    double r_n = 0.05;      // nominal interest rate
    double pi_hat = 0.02;   // inflation drift
    double pi_tilde = 0.1;  // inflation volatility
    double delta = 0.04;    // time preference
    double gamma = 0.5;     // power-utility exponent, < 1 and != 0
    double eps = 0.5;       // wage fraction retained at a loss event
    double K = 0.0;         // terminal savings floor, <= 0
    double x_a = 1.0;       // initial real savings, > 0
    double w_a = 1.0;       // initial real wage, >= 0
    double a = 0.0;         // planning start time
    double T = 10.0;        // planning horizon
    LevySpec levy{1.0, MarkDistribution::exponential(0.2), 0.25};

    double alpha() const { return levy_moments(levy).alpha; }
    double beta() const { return levy_moments(levy).beta; }

    double r_hat() const { return r_n - pi_hat; }
    // mean-reversion rate of the wage mean: inflation erosion plus expected
    // loss-event drain
    double kappa() const { return pi_hat + beta() * (1.0 - eps); }

    TimeGrid make_grid(int n_steps) const { return TimeGrid(a, T, n_steps); }

    bool operator==(const MarketParams&) const = default;

    void validate() const {
        levy.validate();
        if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("params: eps must lie in (0,1)");
        if (!(gamma < 1.0) || gamma == 0.0) {
            throw std::invalid_argument("params: gamma must satisfy gamma < 1 and gamma != 0");
        }
        if (!(delta > 0.0)) throw std::invalid_argument("params: delta must be > 0");
        if (!(x_a > 0.0)) throw std::invalid_argument("params: x_a must be > 0");
        if (!(w_a >= 0.0)) throw std::invalid_argument("params: w_a must be >= 0");
        if (!(K <= 0.0)) throw std::invalid_argument("params: K must be <= 0");
        if (!(T > 0.0)) throw std::invalid_argument("params: T must be > 0");
        if (!(a >= 0.0)) throw std::invalid_argument("params: a must be >= 0");
        if (!(pi_tilde >= 0.0)) throw std::invalid_argument("params: pi_tilde must be >= 0");
    }
};

} // namespace ocp
