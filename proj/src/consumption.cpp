#include "ocp/consumption.hpp"

#include "ocp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ocp {

double CrraUtility::value(double c) const {
    if (!(c > 0.0)) throw std::domain_error("CrraUtility::value: c must be > 0");
    return std::pow(c, gamma) / gamma;
}

double CrraUtility::marginal(double c) const {
    if (!(c > 0.0)) throw std::domain_error("CrraUtility::marginal: c must be > 0");
    return std::pow(c, gamma - 1.0);
}

double CrraUtility::inverse_marginal(double p) const {
    if (!(p > 0.0)) throw std::domain_error("CrraUtility::inverse_marginal: p must be > 0");
    return std::pow(p, 1.0 / (gamma - 1.0));
}

ConsumptionSchedule ConsumptionSchedule::exponential(double terminal_level, double rate,
                                                     double t_start, double t_end) {
    if (!(t_start < t_end)) throw std::invalid_argument("schedule: empty time interval");
    ConsumptionSchedule s;
    s.t_start_ = t_start;
    s.t_end_ = t_end;
    s.terminal_level_ = terminal_level;
    s.rate_ = rate;
    return s;
}

ConsumptionSchedule ConsumptionSchedule::constant(double level, double t_start, double t_end) {
    return exponential(level, 0.0, t_start, t_end);
}

ConsumptionSchedule ConsumptionSchedule::tabulated(std::vector<double> times,
                                                   std::vector<double> values) {
    if (times.size() < 2 || times.size() != values.size()) {
        throw std::invalid_argument("schedule: tabulated form needs matching times/values");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("schedule: tabulated times must be sorted");
    }
    ConsumptionSchedule s;
    s.t_start_ = times.front();
    s.t_end_ = times.back();
    s.tab_times_ = std::move(times);
    s.tab_values_ = std::move(values);
    return s;
}

ConsumptionSchedule ConsumptionSchedule::shifted(double offset) const {
    ConsumptionSchedule s = *this;
    if (is_exponential()) {
        s.offset_ += offset;
    } else {
        for (double& v : s.tab_values_) v += offset;
    }
    return s;
}

ConsumptionSchedule ConsumptionSchedule::scaled(double factor) const {
    ConsumptionSchedule s = *this;
    if (is_exponential()) {
        s.terminal_level_ *= factor;
        s.offset_ *= factor;
    } else {
        for (double& v : s.tab_values_) v *= factor;
    }
    return s;
}

double ConsumptionSchedule::at(double t) const {
    if (is_exponential()) {
        return terminal_level_ * std::exp(rate_ * (t - t_end_)) + offset_;
    }
    if (t <= tab_times_.front()) return tab_values_.front();
    if (t >= tab_times_.back()) return tab_values_.back();
    const auto it = std::upper_bound(tab_times_.begin(), tab_times_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - tab_times_.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - tab_times_[lo]) / (tab_times_[hi] - tab_times_[lo]);
    return tab_values_[lo] * (1.0 - w) + tab_values_[hi] * w;
}

double ConsumptionSchedule::min_value() const {
    if (is_exponential()) {
        return std::min(at(t_start_), at(t_end_)); // exponential + constant is monotone
    }
    return *std::min_element(tab_values_.begin(), tab_values_.end());
}

SubjectiveRates subjective_rates(const MarketParams& params) {
    const double r_hat = params.r_hat();
    return {r_hat, (r_hat - params.delta) / (1.0 - params.gamma)};
}

double annuity_factor(const MarketParams& params) {
    const auto [r_hat, gamma_hat] = subjective_rates(params);
    const double gap = r_hat - gamma_hat;
    const double T = params.T;
    if (std::abs(gap) < 1e-9) return T * (1.0 + gap * T / 2.0);
    return (std::exp(gap * T) - 1.0) / gap;
}

double expected_discount(const MarketParams& params, double s, double t) {
    if (s > t) throw std::domain_error("expected_discount: need s <= t");
    if (s < 0.0 || t > params.T) throw std::domain_error("expected_discount: times outside [0,T]");
    const double beta = params.beta();
    const double eps = params.eps;
    const double theta =
        params.pi_hat + beta * (1.0 - eps) - beta * (eps - 1.0 - std::log(eps));
    return std::exp(params.r_hat() * (params.T - t)) * std::exp(-theta * (t - s));
}

double wage_mean(const MarketParams& params, double t) {
    const double tau = t - params.a;
    if (tau < -1e-12 || tau > params.T + 1e-12) {
        throw std::domain_error("wage_mean: t outside [a, T+a]");
    }
    const double kappa = params.kappa();
    const double alpha = params.alpha();
    const double decay = std::exp(-kappa * tau);
    const double accum = (kappa == 0.0) ? tau : -std::expm1(-kappa * tau) / kappa;
    return params.w_a * decay + alpha * accum;
}

double wage_mean_discount(const MarketParams& params, double s, double t) {
    if (s > t) throw std::domain_error("wage_mean_discount: need s <= t");
    return std::exp(params.r_hat() * (params.T - t)) * std::exp(-params.kappa() * (t - s));
}

double expected_terminal_resources(const MarketParams& params) {
    params.validate();
    const double T = params.T;
    const double alpha = params.alpha();
    // the contract is 1e-8 relative accuracy; the tighter request costs a
    // handful of extra panels and keeps downstream budget residuals near
    // floating-point noise
    auto outer = [&](double t) {
        double inner = 0.0;
        if (alpha != 0.0 && t > 0.0) {
            inner = adaptive_simpson([&](double s) { return wage_mean_discount(params, s, t); },
                                     0.0, t, 1e-12, 1e-15);
        }
        return params.w_a * wage_mean_discount(params, 0.0, t) + alpha * inner;
    };
    const double wage_pv = adaptive_simpson(outer, 0.0, T, 1e-11, 1e-14);
    return params.x_a * std::exp(params.r_hat() * T) + wage_pv - params.K;
}

double lambda_star(const MarketParams& params) {
    const double c_hat = expected_terminal_resources(params);
    if (!(c_hat > 0.0)) {
        throw infeasible_error("lambda_star: expected terminal resources are not positive");
    }
    return std::pow(c_hat / annuity_factor(params), params.gamma - 1.0);
}

SoftSolution optimal_consumption(const MarketParams& params) {
    params.validate();
    const auto [r_hat, gamma_hat] = subjective_rates(params);
    SoftSolution sol;
    sol.r_hat = r_hat;
    sol.gamma_hat = gamma_hat;
    sol.B_hat = annuity_factor(params);
    sol.C_hat = expected_terminal_resources(params);
    if (!(sol.C_hat > 0.0)) {
        throw infeasible_error("optimal_consumption: expected terminal resources are not positive");
    }
    sol.lambda_star = std::pow(sol.C_hat / sol.B_hat, params.gamma - 1.0);
    sol.schedule = ConsumptionSchedule::exponential(sol.C_hat / sol.B_hat, gamma_hat, params.a,
                                                    params.a + params.T);
    return sol;
}

double savings_shadow_price(const MarketParams& params, double lambda, double t) {
    return lambda * std::exp((params.r_n - params.pi_hat - params.delta) * (params.a + params.T - t));
}

ConsumptionSchedule consumption_for_multiplier(const MarketParams& params, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("consumption_for_multiplier: lambda must be > 0");
    const CrraUtility u{params.gamma};
    const double t_end = params.a + params.T;
    // inverse marginal of the deterministic shadow price is an exponential in t
    const double terminal_level = u.inverse_marginal(lambda);
    const double rate = -(params.r_hat() - params.delta) / (params.gamma - 1.0);
    return ConsumptionSchedule::exponential(terminal_level, rate, params.a, t_end);
}

double objective_value(const MarketParams& params, const ConsumptionSchedule& schedule) {
    if (schedule.min_value() < 0.0) {
        throw std::invalid_argument("objective_value: schedule must be nonnegative");
    }
    if (params.gamma < 0.0 && schedule.min_value() <= 0.0) {
        return -std::numeric_limits<double>::infinity(); // infeasible for utility
    }
    const CrraUtility u{params.gamma};
    auto integrand = [&](double t) {
        const double c = schedule.at(t);
        if (c == 0.0) return 0.0; // continuous extension for gamma in (0,1)
        return std::exp(-params.delta * (t - params.a)) * u.value(c);
    };
    return adaptive_simpson(integrand, params.a, params.a + params.T, 1e-10, 1e-14);
}

McEstimate terminal_expectation(const MarketParams& params, const ConsumptionSchedule& schedule,
                                int n_steps, long n_paths, std::uint64_t seed,
                                double confidence) {
    params.validate();
    const TimeGrid grid = params.make_grid(n_steps);
    auto terminal = [&](const ScenarioPath& scenario) {
        const WagePath wage = simulate_wage_exact(params, scenario);
        const SavingsPath x = simulate_savings(
            params, wage, [&](double t) { return schedule.at(t); }, scenario);
        return x.value.back();
    };
    return mc_estimate(grid, params.levy, n_paths, seed, confidence, terminal);
}

} // namespace ocp
