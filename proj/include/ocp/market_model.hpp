#pragma once

#include "ocp/market_params.hpp"
#include "ocp/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ocp {

// A piecewise trajectory registered on a scenario's time set. `value` is the
// post-jump (cadlag) value; `left` the left limit. They differ only at jump
// instants.
struct PiecewisePath {
    const ScenarioPath* scenario = nullptr;
    std::vector<double> value;
    std::vector<double> left;

    double at(double t) const { return value[scenario->index_at(t)]; }
    double left_at(double t) const { return left[scenario->index_at(t)]; }
};

using WagePath = PiecewisePath;

struct SavingsPath {
    const ScenarioPath* scenario = nullptr;
    std::vector<double> value; // savings are continuous, no left limits needed

    double at(double t) const { return value[scenario->index_at(t)]; }
};

// Pi(t) = pi_hat t + pi_tilde^2 t / 2 + pi_tilde B(t): numeraire adjustment.
// R(t) = r_n t - Pi(t): real discount exponent.
// zeta(t) = Pi(t) + beta (1-eps) t - ln(eps) * (compensated loss count on
// (a, t]): the wage deflator exponent. Only zeta jumps.
struct DiscountProcesses {
    const ScenarioPath* scenario = nullptr;
    std::vector<double> Pi;
    std::vector<double> R;
    std::vector<double> zeta;
    std::vector<double> zeta_left;

    double Pi_at(double t) const { return Pi[scenario->index_at(t)]; }
    double R_at(double t) const { return R[scenario->index_at(t)]; }
    double zeta_at(double t) const { return zeta[scenario->index_at(t)]; }
};

// Consumption-price level xi(t) = exp((pi_hat - pi_tilde^2/2) t + pi_tilde B(t)),
// normalized to 1 at t = 0.
double price_level(const MarketParams& params, const ScenarioPath& scenario, double t);
std::vector<double> price_level_path(const MarketParams& params, const ScenarioPath& scenario);

DiscountProcesses discount_processes(const MarketParams& params, const ScenarioPath& scenario);

// Event-driven exact simulation of the real wage: geometric decay by
// exp(-(pi_hat + pi_tilde^2/2) dt - pi_tilde dB) between events, W += z at a
// gain event, W *= eps at a loss event (gain applied first on a tie).
WagePath simulate_wage_exact(const MarketParams& params, const ScenarioPath& scenario);

struct EulerWageResult {
    TimeGrid grid;
    std::vector<double> values; // one value per Euler node
    long clamp_count = 0;       // steps where W was clamped at 0
    long step_count = 0;

    double terminal() const { return values.back(); }
    double clamp_rate() const {
        return step_count > 0 ? static_cast<double>(clamp_count) / step_count : 0.0;
    }
    // runs with clamp rate above 0.1% of steps are unusable for convergence
    // studies
    bool valid_for_convergence() const { return clamp_rate() <= 1e-3; }
};

// Explicit Euler on the compensated wage dynamics over `euler_grid`, whose
// nodes must all be registered on the scenario (grid.n_steps divisible by
// euler_grid.n_steps). Jumps land in their enclosing cell.
EulerWageResult simulate_wage_euler(const MarketParams& params, const ScenarioPath& scenario,
                                    const TimeGrid& euler_grid);

// Literal evaluation of the linear-SDE representation of the wage driven by
// the deflator exponent zeta. Ships for the discrepancy harness below; the
// event-driven simulator is the authority.
WagePath wage_closed_form(const MarketParams& params, const ScenarioPath& scenario);

// Solution of dX = (mu(t) + alpha_coef X) dt + beta_coef X dB with X(a) = x_a
// evaluated at every registered time, forcing integrated by the trapezoid
// rule with left limits at jump instants.
std::vector<double> linear_sde_solve_path(double alpha_coef, double beta_coef,
                                          const PiecewisePath& forcing, double x_a,
                                          const ScenarioPath& scenario);
double linear_sde_solve(double alpha_coef, double beta_coef, const PiecewisePath& forcing,
                        double x_a, const ScenarioPath& scenario, double t);

// Real savings under a consumption flow c: X' = (r_n - pi_hat) X + W - c with
// volatility -pi_tilde X, via the integrating-factor solution.
SavingsPath simulate_savings(const MarketParams& params, const WagePath& wage,
                             const std::function<double(double)>& consumption,
                             const ScenarioPath& scenario);

// Euler cross-check of the savings SDE on the registered times.
SavingsPath simulate_savings_euler(const MarketParams& params, const WagePath& wage,
                                   const std::function<double(double)>& consumption,
                                   const ScenarioPath& scenario);

// F(t) = int_a^t e^{R(t)-R(s)} ds: the pathwise annuity of a unit consumption
// shift (X_{c+h} = X_c - h F pathwise).
std::vector<double> unit_shift_factor_path(const MarketParams& params,
                                           const ScenarioPath& scenario);

// Pathwise comparison of the zeta-kernel wage representation against the
// event-driven simulator. The harness measures; it never corrects.
struct WageLemmaReport {
    std::vector<double> times;
    std::vector<double> ratio_mean;    // mean over paths of W_repr / W_exact
    std::vector<double> ratio_se;
    std::vector<double> reference;     // exp(-beta ((1-eps) + ln eps) (t-a))
    double max_abs_deviation = 0.0;    // max |ratio_mean - 1|
    bool drift_detected = false;
    std::string verdict;
    long n_paths = 0;
    std::uint64_t seed = 0;
};

WageLemmaReport wage_lemma_discrepancy(const MarketParams& params, int grid_steps,
                                       long n_paths, std::uint64_t seed);

} // namespace ocp
