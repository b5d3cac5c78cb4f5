#pragma once

#include "ocp/market_model.hpp"
#include "ocp/market_params.hpp"
#include "ocp/mc.hpp"

#include <stdexcept>
#include <vector>

namespace ocp {

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Power utility u(c) = c^gamma / gamma, gamma < 1, gamma != 0.
struct CrraUtility {
    double gamma = 0.5;

    double value(double c) const;
    double marginal(double c) const;         // u'(c) = c^{gamma-1}
    double inverse_marginal(double p) const; // p^{1/(gamma-1)}
};

// Deterministic consumption plan on [t_start, t_end]: either an exponential
// level curve (optionally shifted by a constant) or a tabulated curve with
// linear interpolation.
class ConsumptionSchedule {
public:
    static ConsumptionSchedule exponential(double terminal_level, double rate, double t_start,
                                           double t_end);
    static ConsumptionSchedule constant(double level, double t_start, double t_end);
    static ConsumptionSchedule tabulated(std::vector<double> times, std::vector<double> values);

    ConsumptionSchedule shifted(double offset) const; // c(t) + offset
    ConsumptionSchedule scaled(double factor) const;  // factor * c(t)

    double at(double t) const;
    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    double min_value() const;

    bool is_exponential() const { return tab_times_.empty(); }
    double terminal_level() const { return terminal_level_; }
    double rate() const { return rate_; }
    double offset() const { return offset_; }

private:
    ConsumptionSchedule() = default;
    double t_start_ = 0.0, t_end_ = 0.0;
    double terminal_level_ = 0.0, rate_ = 0.0, offset_ = 0.0;
    std::vector<double> tab_times_, tab_values_;
};

struct SubjectiveRates {
    double r_hat;     // real interest rate r_n - pi_hat
    double gamma_hat; // consumption growth rate (r_hat - delta) / (1 - gamma)
};

// Solved soft-constraint plan.
struct SoftSolution {
    double r_hat = 0.0;
    double gamma_hat = 0.0;
    double B_hat = 0.0;       // annuity factor
    double C_hat = 0.0;       // expected terminal resources net of the floor
    double lambda_star = 0.0; // multiplier pinning E[X(T+a)] = K
    ConsumptionSchedule schedule = ConsumptionSchedule::constant(0.0, 0.0, 1.0);

    double consumption_at(double t) const { return schedule.at(t); }
};

SubjectiveRates subjective_rates(const MarketParams& params);

// B_hat = (e^{(r_hat - gamma_hat) T} - 1) / (r_hat - gamma_hat), with the
// series limit T (1 + (r_hat - gamma_hat) T / 2) when the gap is below 1e-9.
double annuity_factor(const MarketParams& params);

// E[e^{R(T+a)-R(t+a) - (zeta(t+a)-zeta(s+a))}] for 0 <= s <= t <= T, in
// closed form from the independent-increment moment generating functions.
// This is the expectation of the pathwise deflator functional itself; see
// wage_mean_discount for the kernel consistent with the simulated mean.
double expected_discount(const MarketParams& params, double s, double t);

// E[W(t)] for absolute t in [a, T+a]: solution of m' = alpha - kappa m.
double wage_mean(const MarketParams& params, double t);

// e^{r_hat (T-t)} e^{-kappa (t-s)} for shifted times 0 <= s <= t <= T: the
// expected terminal-value weight of wage mass present at s, propagated by the
// mean wage dynamics and discounted from t to T. Satisfies
// E[e^{R(T+a)-R(t+a)} W(t+a)] = e^{r_hat (T-t)} E[W(t+a)] by independence of
// W(t+a) from later Brownian increments. Differs from expected_discount by
// the factor exp(-beta((1-eps)+log(eps))(t-s)); the simulator fixes which one
// prices resources correctly.
double wage_mean_discount(const MarketParams& params, double s, double t);

// C_hat = x_a e^{r_hat T} + w_a int_0^T k(0,t) dt
//       + alpha int_0^T int_0^t k(s,t) ds dt - K,
// k = wage_mean_discount, by adaptive Simpson to 1e-8 relative tolerance.
double expected_terminal_resources(const MarketParams& params);

// lambda* = (C_hat / B_hat)^{gamma - 1}; throws infeasible_error if
// C_hat <= 0 (cannot happen for K <= 0, x_a > 0).
double lambda_star(const MarketParams& params);

SoftSolution optimal_consumption(const MarketParams& params);

// Deterministic adjoint of savings: lambda e^{(r_n - pi_hat - delta)(T+a-t)}.
double savings_shadow_price(const MarketParams& params, double lambda, double t);

// Multiplier-indexed candidate plan c_lambda(t) = (lambda e^{(r_hat-delta)(T+a-t)})^{1/(gamma-1)}.
ConsumptionSchedule consumption_for_multiplier(const MarketParams& params, double lambda);

// int_a^{T+a} e^{-delta (t-a)} u(c(t)) dt for a deterministic schedule;
// -infinity if gamma < 0 and the schedule touches zero.
double objective_value(const MarketParams& params, const ConsumptionSchedule& schedule);

// Monte Carlo E[X_c(T+a)] with the exact wage simulator and the
// integrating-factor savings solution on an n_steps grid.
McEstimate terminal_expectation(const MarketParams& params, const ConsumptionSchedule& schedule,
                                int n_steps, long n_paths, std::uint64_t seed,
                                double confidence = 0.95);

} // namespace ocp
