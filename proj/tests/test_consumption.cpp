#include "ocp/consumption.hpp"

#include "ocp/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ocp;

namespace {

MarketParams baseline() {
    return MarketParams{};
}

MarketParams all_deterministic() {
    MarketParams p;
    p.pi_tilde = 0.0;
    p.levy = {0.0, MarkDistribution::exponential(0.2), 0.0};
    return p;
}

} // namespace

TEST_CASE("power utility values and inverses") {
    const CrraUtility u{0.5};
    CHECK(u.value(4.0) == doctest::Approx(4.0).epsilon(1e-15));
    // u'(c) = c^{gamma-1}: 4^{-0.5} = 0.5
    CHECK(u.marginal(4.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(u.inverse_marginal(0.25) == doctest::Approx(16.0).epsilon(1e-14));
    for (double c : {0.1, 1.0, 10.0}) {
        CHECK(u.inverse_marginal(u.marginal(c)) == doctest::Approx(c).epsilon(1e-13));
    }
    CHECK_THROWS_AS(u.value(0.0), std::domain_error);
    CHECK_THROWS_AS(u.marginal(-1.0), std::domain_error);
    CHECK_THROWS_AS(u.inverse_marginal(0.0), std::domain_error);
}

TEST_CASE("subjective rates at the baseline and degenerate cases") {
    const auto [r_hat, gamma_hat] = subjective_rates(baseline());
    CHECK(r_hat == doctest::Approx(0.03).epsilon(1e-15));
    CHECK(gamma_hat == doctest::Approx(-0.02).epsilon(1e-13));

    MarketParams flat = baseline();
    flat.delta = 0.03; // delta = r_hat
    CHECK(subjective_rates(flat).gamma_hat == doctest::Approx(0.0));

    MarketParams very_averse = baseline();
    very_averse.gamma = -50.0;
    const double gh = subjective_rates(very_averse).gamma_hat;
    CHECK(std::abs(gh) < 1e-3);
    CHECK(gh < 0.0); // sign of r_hat - delta
}

TEST_CASE("annuity factor: closed form, degenerate gap, and short horizon") {
    MarketParams p = baseline(); // gap r_hat - gamma_hat = 0.05
    CHECK(annuity_factor(p) == doctest::Approx(12.974425414002563).epsilon(1e-12));
    // cross-check against the defining integral
    const auto [r_hat, gamma_hat] = subjective_rates(p);
    const double quad = adaptive_simpson(
        [&](double t) { return std::exp((r_hat - gamma_hat) * (p.T - t)); }, 0.0, p.T, 1e-12);
    CHECK(annuity_factor(p) == doctest::Approx(quad).epsilon(1e-10));

    MarketParams degenerate = baseline();
    degenerate.delta = 0.015; // gamma_hat = r_hat
    CHECK(annuity_factor(degenerate) == doctest::Approx(degenerate.T).epsilon(1e-12));

    MarketParams short_horizon = baseline();
    short_horizon.T = 0.01;
    CHECK(annuity_factor(short_horizon) > 0.01);
    CHECK(annuity_factor(short_horizon) < 0.0101);
}

TEST_CASE("expected discount: boundary values and volatility independence") {
    MarketParams p = baseline();
    CHECK(expected_discount(p, p.T, p.T) == 1.0);
    for (double pi_tilde : {0.0, 0.1, 0.2}) {
        MarketParams q = p;
        q.pi_tilde = pi_tilde;
        CHECK(expected_discount(q, 3.0, 3.0) ==
              doctest::Approx(std::exp(q.r_hat() * (q.T - 3.0))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(expected_discount(p, 2.0, 1.0), std::domain_error);
}

TEST_CASE("expected discount matches Monte Carlo of the deflator functional") {
    MarketParams p = baseline();
    const TimeGrid grid = p.make_grid(100);
    const double s = 0.0, t = 1.0;
    const McEstimate est =
        mc_estimate(grid, p.levy, 20000, 59, 0.95, [&](const ScenarioPath& sc) {
            const DiscountProcesses dp = discount_processes(p, sc);
            const double t_end = p.a + p.T;
            return std::exp(dp.R_at(t_end) - dp.R_at(p.a + t) -
                            (dp.zeta_at(p.a + t) - dp.zeta_at(p.a + s)));
        });
    CHECK(std::abs(est.mean - expected_discount(p, s, t)) <= 3.0 * est.std_error);
}

TEST_CASE("wage mean closed form at the baseline checkpoints") {
    MarketParams p = baseline();
    CHECK(wage_mean(p, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(wage_mean(p, 1.0) == doctest::Approx(1.0511984405442016).epsilon(1e-12));
    CHECK(wage_mean(p, 5.0) == doctest::Approx(1.1956010255686556).epsilon(1e-12));
    CHECK(wage_mean(p, 10.0) == doctest::Approx(1.2903354079644216).epsilon(1e-12));
}

TEST_CASE("wage mean handles a zero-decay economy") {
    MarketParams p = baseline();
    p.pi_hat = 0.0;
    p.levy.n2_intensity = 0.0; // kappa = 0: mean grows linearly
    CHECK(wage_mean(p, 4.0) == doctest::Approx(p.w_a + p.alpha() * 4.0).epsilon(1e-13));
}

TEST_CASE("the two discount kernels differ by the deflator drift exactly") {
    MarketParams p = baseline();
    const double drift = -p.beta() * ((1.0 - p.eps) + std::log(p.eps));
    for (double s : {0.0, 1.0, 3.0}) {
        for (double t : {4.0, 7.0, 10.0}) {
            const double ratio = expected_discount(p, s, t) / wage_mean_discount(p, s, t);
            CHECK(ratio == doctest::Approx(std::exp(drift * (t - s))).epsilon(1e-12));
        }
    }
}

TEST_CASE("terminal resources: savings-only economy") {
    MarketParams p = baseline();
    p.w_a = 0.0;
    p.levy.n1_intensity = 0.0; // alpha = 0
    CHECK(expected_terminal_resources(p) ==
          doctest::Approx(p.x_a * std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("terminal resources at the baseline against an independent quadrature") {
    MarketParams p = baseline();
    // frozen from a 30-digit evaluation of x_a e^{r_hat T} + int e^{r_hat
    // (T-t)} m(t) dt
    CHECK(expected_terminal_resources(p) ==
          doctest::Approx(15.017947093966111).epsilon(1e-8));
    // a second numeric route: fixed-panel trapezoid over the mean wage curve
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = p.T * static_cast<double>(i) / n;
        const double f = std::exp(p.r_hat() * (p.T - t)) * wage_mean(p, p.a + t);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    acc *= p.T / n;
    const double reference = p.x_a * std::exp(p.r_hat() * p.T) + acc - p.K;
    CHECK(expected_terminal_resources(p) == doctest::Approx(reference).epsilon(1e-9));
}

TEST_CASE("multiplier closed form and its relation to the annuity") {
    MarketParams p = baseline();
    const double c_hat = expected_terminal_resources(p);
    const double b_hat = annuity_factor(p);
    const double lam = lambda_star(p);
    CHECK(lam == doctest::Approx(0.9294772873864201).epsilon(1e-8));
    CHECK(lam == doctest::Approx(std::pow(c_hat / b_hat, p.gamma - 1.0)).epsilon(1e-14));
}

TEST_CASE("optimal consumption: flat plan when gamma_hat vanishes") {
    MarketParams p = baseline();
    p.delta = 0.03; // gamma_hat = 0
    const SoftSolution sol = optimal_consumption(p);
    CHECK(sol.gamma_hat == doctest::Approx(0.0));
    const double level = sol.C_hat / sol.B_hat;
    for (double t : {0.0, 2.5, 10.0}) {
        CHECK(sol.consumption_at(t) == doctest::Approx(level).epsilon(1e-12));
    }
}

TEST_CASE("annuity collapses to the horizon when both rates vanish together") {
    // B_hat = T requires r_hat = gamma_hat, i.e. delta = gamma r_hat
    MarketParams p = baseline();
    p.delta = p.gamma * p.r_hat();
    const auto [r_hat, gamma_hat] = subjective_rates(p);
    CHECK(r_hat == doctest::Approx(gamma_hat).epsilon(1e-14));
    const SoftSolution sol = optimal_consumption(p);
    CHECK(sol.B_hat == doctest::Approx(p.T).epsilon(1e-9));
}

TEST_CASE("optimal consumption is exponential with the subjective growth rate") {
    const SoftSolution sol = optimal_consumption(baseline());
    for (double s : {0.0, 2.0, 5.0}) {
        for (double t : {6.0, 8.0, 10.0}) {
            const double ratio = sol.consumption_at(t) / sol.consumption_at(s);
            CHECK(ratio == doctest::Approx(std::exp(sol.gamma_hat * (t - s))).epsilon(1e-12));
        }
    }
    CHECK(sol.consumption_at(0.0) > 0.0);
}

TEST_CASE("budget identity in the deterministic model") {
    // with all randomness off, X under the solved plan must land exactly on
    // the floor; an RK4 forward integration is the oracle
    MarketParams p = all_deterministic();
    const SoftSolution sol = optimal_consumption(p);
    auto rhs = [&](double t, double x) {
        const double wage = p.w_a * std::exp(-p.pi_hat * (t - p.a));
        return p.r_hat() * x + wage - sol.consumption_at(t);
    };
    const int n = 20000;
    double x = p.x_a;
    const double h = p.T / n;
    for (int i = 0; i < n; ++i) {
        const double t = p.a + h * i;
        const double k1 = rhs(t, x);
        const double k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = rhs(t + h, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK(std::abs(x - p.K) < 1e-8);
}

TEST_CASE("terminal expectation sits on the floor at the baseline") {
    MarketParams p = baseline();
    const SoftSolution sol = optimal_consumption(p);
    const McEstimate est = terminal_expectation(p, sol.schedule, 200, 20000, 61);
    CHECK(std::abs(est.mean - p.K) <= 3.0 * est.std_error);
}

TEST_CASE("over-consuming shifts the terminal mean by the annuity value") {
    MarketParams p = baseline();
    const SoftSolution sol = optimal_consumption(p);
    const double shift = 0.1;
    const McEstimate est = terminal_expectation(p, sol.schedule.shifted(shift), 200, 20000, 61);
    const double f_mean = -std::expm1(p.r_hat() * p.T) / -p.r_hat(); // (e^{rT}-1)/r
    CHECK(std::abs(est.mean - (p.K - shift * f_mean)) <= 3.0 * est.std_error);
}

TEST_CASE("shadow price terminal value and constant case") {
    MarketParams p = baseline();
    CHECK(savings_shadow_price(p, 0.7, p.a + p.T) == 0.7);
    MarketParams flat = baseline();
    flat.delta = 0.03; // r_hat = delta
    for (double t : {0.0, 5.0, 10.0}) {
        CHECK(savings_shadow_price(flat, 0.7, t) == doctest::Approx(0.7).epsilon(1e-15));
    }
}

TEST_CASE("first-order condition holds to floating-point precision") {
    MarketParams p = baseline();
    const SoftSolution sol = optimal_consumption(p);
    const CrraUtility u{p.gamma};
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = p.a + p.T * static_cast<double>(i) / 1000.0;
        const double price = savings_shadow_price(p, sol.lambda_star, t);
        worst = std::max(worst, std::abs(u.marginal(sol.consumption_at(t)) - price) / price);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("objective value of a constant plan") {
    // oracle: int_0^10 e^{-0.04 t} 2 sqrt(1) dt = 2 (1 - e^{-0.4}) / 0.04,
    // frozen at high precision
    MarketParams p = baseline();
    const auto one = ConsumptionSchedule::constant(1.0, p.a, p.a + p.T);
    CHECK(objective_value(p, one) == doctest::Approx(16.483997698218035).epsilon(1e-10));
}

TEST_CASE("objective vanishes with the plan for gamma in (0,1)") {
    MarketParams p = baseline();
    const auto tiny = ConsumptionSchedule::constant(1e-12, p.a, p.a + p.T);
    CHECK(objective_value(p, tiny) < 1e-4);
    CHECK(objective_value(p, tiny) > 0.0);
}

TEST_CASE("objective reports infeasible-for-utility under negative gamma") {
    MarketParams p = baseline();
    p.gamma = -1.0;
    const auto touching =
        ConsumptionSchedule::tabulated({0.0, 5.0, 10.0}, {1.0, 0.0, 1.0});
    CHECK(objective_value(p, touching) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("comparative statics of the resource stock") {
    const MarketParams p = baseline();
    const double base = expected_terminal_resources(p);

    MarketParams richer = p;
    richer.x_a = 2.0;
    CHECK(expected_terminal_resources(richer) > base);

    MarketParams better_paid = p;
    better_paid.w_a = 2.0;
    CHECK(expected_terminal_resources(better_paid) > base);

    MarketParams more_gains = p;
    more_gains.levy.n1_intensity = 2.0;
    CHECK(expected_terminal_resources(more_gains) > base);

    MarketParams lower_floor = p;
    lower_floor.K = -1.0;
    CHECK(expected_terminal_resources(lower_floor) ==
          doctest::Approx(base + 1.0).epsilon(1e-12));

    // consumption level scales linearly with the stock
    const SoftSolution sol = optimal_consumption(p);
    const SoftSolution sol_low = optimal_consumption(lower_floor);
    const double scale = sol_low.C_hat / sol.C_hat;
    CHECK(sol_low.consumption_at(3.0) ==
          doctest::Approx(scale * sol.consumption_at(3.0)).epsilon(1e-12));
}

TEST_CASE("solved plan dominates perturbed feasible plans") {
    MarketParams p = baseline();
    const SoftSolution sol = optimal_consumption(p);
    const double objective_star = objective_value(p, sol.schedule);
    const double c_hat = sol.C_hat;

    // consumption present value int_0^T e^{r_hat (T-t)} c(a+t) dt
    auto cpv = [&](const ConsumptionSchedule& c) {
        return adaptive_simpson(
            [&](double t) { return std::exp(p.r_hat() * (p.T - t)) * c.at(p.a + t); }, 0.0, p.T,
            1e-11);
    };
    const double unit_pv = cpv(ConsumptionSchedule::constant(1.0, p.a, p.a + p.T));

    int checked = 0;
    for (double scale : {0.9, 0.95, 1.05, 1.1}) {
        for (double tilt : {-0.02, -0.01, 0.005, 0.01, 0.02}) {
            // tilted exponential, re-fit to the binding constraint by a shift
            const double level =
                sol.schedule.terminal_level() * scale * std::exp(tilt * p.T);
            ConsumptionSchedule pert = ConsumptionSchedule::exponential(
                level, sol.gamma_hat + tilt, p.a, p.a + p.T);
            const double shift = (c_hat - cpv(pert)) / unit_pv;
            pert = pert.shifted(shift);
            REQUIRE(pert.min_value() > 0.0);
            CHECK(std::abs(cpv(pert) - c_hat) < 1e-7); // refit is binding
            CHECK(objective_value(p, pert) <= objective_star + 1e-10);
            ++checked;
        }
    }
    CHECK(checked == 20);
}

TEST_CASE("multiplier-indexed plan recovers the solved schedule at lambda*") {
    MarketParams p = baseline();
    const SoftSolution sol = optimal_consumption(p);
    const ConsumptionSchedule plan = consumption_for_multiplier(p, sol.lambda_star);
    for (double t : {0.0, 3.3, 7.7, 10.0}) {
        CHECK(plan.at(t) == doctest::Approx(sol.consumption_at(t)).epsilon(1e-12));
    }
}

TEST_CASE("schedule representations: shift, scale, tabulation") {
    const auto expo = ConsumptionSchedule::exponential(2.0, -0.02, 0.0, 10.0);
    CHECK(expo.at(10.0) == doctest::Approx(2.0));
    CHECK(expo.shifted(0.5).at(10.0) == doctest::Approx(2.5));
    CHECK(expo.scaled(2.0).at(10.0) == doctest::Approx(4.0));
    CHECK(expo.min_value() == doctest::Approx(2.0)); // decaying rate: minimum at the end

    const auto tab = ConsumptionSchedule::tabulated({0.0, 1.0, 2.0}, {1.0, 3.0, 2.0});
    CHECK(tab.at(0.5) == doctest::Approx(2.0));
    CHECK(tab.at(1.5) == doctest::Approx(2.5));
    CHECK(tab.min_value() == 1.0);
    CHECK_THROWS_AS(ConsumptionSchedule::tabulated({1.0}, {1.0}), std::invalid_argument);
}
