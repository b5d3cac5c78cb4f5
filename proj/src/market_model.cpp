#include "ocp/market_model.hpp"

#include "ocp/mc.hpp"
#include "ocp/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ocp {

double price_level(const MarketParams& params, const ScenarioPath& scenario, double t) {
    const double b = scenario.brownian[scenario.index_at(t)];
    return std::exp((params.pi_hat - 0.5 * params.pi_tilde * params.pi_tilde) * t +
                    params.pi_tilde * b);
}

std::vector<double> price_level_path(const MarketParams& params, const ScenarioPath& scenario) {
    const double drift = params.pi_hat - 0.5 * params.pi_tilde * params.pi_tilde;
    std::vector<double> xi(scenario.size());
    for (std::size_t i = 0; i < scenario.size(); ++i) {
        xi[i] = std::exp(drift * scenario.times[i] + params.pi_tilde * scenario.brownian[i]);
    }
    return xi;
}

DiscountProcesses discount_processes(const MarketParams& params, const ScenarioPath& scenario) {
    const double beta = params.beta();
    const double log_eps = std::log(params.eps);
    const double a = scenario.grid.start();

    DiscountProcesses dp;
    dp.scenario = &scenario;
    const std::size_t n = scenario.size();
    dp.Pi.resize(n);
    dp.R.resize(n);
    dp.zeta.resize(n);
    dp.zeta_left.resize(n);

    long hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = scenario.times[i];
        dp.Pi[i] = params.pi_hat * t + 0.5 * params.pi_tilde * params.pi_tilde * t +
                   params.pi_tilde * scenario.brownian[i];
        dp.R[i] = params.r_n * t - dp.Pi[i];
        const double base = dp.Pi[i] + beta * (1.0 - params.eps) * t;
        const double compensator = beta * (t - a);
        const long hits_before = hits;
        hits += scenario.n2_hits[i];
        dp.zeta_left[i] = base - log_eps * (static_cast<double>(hits_before) - compensator);
        dp.zeta[i] = base - log_eps * (static_cast<double>(hits) - compensator);
    }
    return dp;
}

WagePath simulate_wage_exact(const MarketParams& params, const ScenarioPath& scenario) {
    const double decay_drift = params.pi_hat + 0.5 * params.pi_tilde * params.pi_tilde;

    WagePath w;
    w.scenario = &scenario;
    const std::size_t n = scenario.size();
    w.value.resize(n);
    w.left.resize(n);
    w.value[0] = w.left[0] = params.w_a;

    for (std::size_t i = 1; i < n; ++i) {
        const double dt = scenario.times[i] - scenario.times[i - 1];
        const double db = scenario.brownian[i] - scenario.brownian[i - 1];
        const double decayed =
            w.value[i - 1] * std::exp(-decay_drift * dt - params.pi_tilde * db);
        w.left[i] = decayed;
        double v = decayed + scenario.n1_mark[i]; // gain applied before loss on a tie
        for (int k = 0; k < scenario.n2_hits[i]; ++k) v *= params.eps;
        w.value[i] = v;
    }
    return w;
}

EulerWageResult simulate_wage_euler(const MarketParams& params, const ScenarioPath& scenario,
                                    const TimeGrid& euler_grid) {
    if (euler_grid.start() != scenario.grid.start() ||
        euler_grid.horizon() != scenario.grid.horizon() ||
        scenario.grid.n_steps() % euler_grid.n_steps() != 0) {
        throw std::invalid_argument(
            "simulate_wage_euler: euler grid nodes must be registered on the scenario");
    }
    const double alpha = params.alpha();
    const double beta = params.beta();
    const double kappa = params.kappa();
    const int m = euler_grid.n_steps();
    const double dt = euler_grid.dt();

    // Brownian values at the Euler nodes
    std::vector<double> b(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
        b[static_cast<std::size_t>(i)] = scenario.brownian[scenario.index_at(euler_grid.node(i))];
    }

    // jump increments per cell (t_k, t_{k+1}]
    std::vector<double> gain(static_cast<std::size_t>(m), 0.0);
    std::vector<int> losses(static_cast<std::size_t>(m), 0);
    auto cell_of = [&](double t) {
        int k = static_cast<int>(std::floor((t - euler_grid.start()) / dt));
        if (k >= m) k = m - 1;
        while (k > 0 && t <= euler_grid.node(k)) --k;       // land in (node(k), node(k+1)]
        while (k + 1 < m && t > euler_grid.node(k + 1)) ++k;
        return static_cast<std::size_t>(k);
    };
    for (std::size_t j = 0; j < scenario.n1.times.size(); ++j) {
        gain[cell_of(scenario.n1.times[j])] += scenario.n1.marks[j];
    }
    for (double t : scenario.n2.times) losses[cell_of(t)] += 1;

    EulerWageResult out{euler_grid, std::vector<double>(static_cast<std::size_t>(m) + 1), 0, m};
    double w = params.w_a;
    out.values[0] = w;
    for (int k = 0; k < m; ++k) {
        const std::size_t ku = static_cast<std::size_t>(k);
        const double db = b[ku + 1] - b[ku];
        // compensated-form step; the compensator terms cancel the alpha and
        // beta(1-eps) drifts exactly
        double next = w + (alpha - kappa * w) * dt - params.pi_tilde * w * db +
                      (gain[ku] - alpha * dt) -
                      (1.0 - params.eps) * w * (static_cast<double>(losses[ku]) - beta * dt);
        if (next < 0.0) {
            next = 0.0;
            ++out.clamp_count;
        }
        w = next;
        out.values[ku + 1] = w;
    }
    return out;
}

WagePath wage_closed_form(const MarketParams& params, const ScenarioPath& scenario) {
    const DiscountProcesses dp = discount_processes(params, scenario);
    const double alpha = params.alpha();
    const std::size_t n = scenario.size();

    // cumulative trapezoid of e^{zeta(s)} ds, left limits at loss instants
    std::vector<double> cum_q(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = scenario.times[i] - scenario.times[i - 1];
        cum_q[i] = cum_q[i - 1] +
                   0.5 * dt * (std::exp(dp.zeta[i - 1]) + std::exp(dp.zeta_left[i]));
    }
    // cumulative compensated gain sum: the integrand is predictable, so each
    // mark enters with the left limit of zeta
    std::vector<double> cum_j(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cum_j[i] = cum_j[i - 1];
        if (scenario.n1_mark[i] > 0.0) {
            cum_j[i] += scenario.n1_mark[i] * std::exp(dp.zeta_left[i]);
        }
    }

    WagePath w;
    w.scenario = &scenario;
    w.value.resize(n);
    w.left.resize(n);
    const double w0 = params.w_a * std::exp(dp.zeta[0]);
    for (std::size_t i = 0; i < n; ++i) {
        const double ds_term = alpha * cum_q[i];
        const double compensated = cum_j[i] - alpha * cum_q[i];
        w.value[i] = std::exp(-dp.zeta[i]) * (w0 + ds_term + compensated);
        const double jump_left = (scenario.n1_mark[i] > 0.0)
                                     ? cum_j[i] - scenario.n1_mark[i] * std::exp(dp.zeta_left[i])
                                     : cum_j[i];
        w.left[i] = std::exp(-dp.zeta_left[i]) * (w0 + ds_term + (jump_left - alpha * cum_q[i]));
    }
    return w;
}

std::vector<double> linear_sde_solve_path(double alpha_coef, double beta_coef,
                                          const PiecewisePath& forcing, double x_a,
                                          const ScenarioPath& scenario) {
    const std::size_t n = scenario.size();
    if (forcing.value.size() != n || forcing.left.size() != n) {
        throw std::invalid_argument("linear_sde_solve: forcing not aligned with scenario");
    }
    // integrating-factor exponent E(t) = alpha t - beta^2 t / 2 + beta B(t)
    std::vector<double> expo(n);
    for (std::size_t i = 0; i < n; ++i) {
        expo[i] = alpha_coef * scenario.times[i] - 0.5 * beta_coef * beta_coef * scenario.times[i] +
                  beta_coef * scenario.brownian[i];
    }
    std::vector<double> x(n);
    double cum = 0.0;
    x[0] = std::exp(expo[0]) * (x_a * std::exp(-expo[0]));
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = scenario.times[i] - scenario.times[i - 1];
        cum += 0.5 * dt * (std::exp(-expo[i - 1]) * forcing.value[i - 1] +
                           std::exp(-expo[i]) * forcing.left[i]);
        x[i] = std::exp(expo[i]) * (x_a * std::exp(-expo[0]) + cum);
    }
    return x;
}

double linear_sde_solve(double alpha_coef, double beta_coef, const PiecewisePath& forcing,
                        double x_a, const ScenarioPath& scenario, double t) {
    return linear_sde_solve_path(alpha_coef, beta_coef, forcing, x_a,
                                 scenario)[scenario.index_at(t)];
}

namespace {

PiecewisePath net_income_path(const WagePath& wage,
                              const std::function<double(double)>& consumption,
                              const ScenarioPath& scenario) {
    PiecewisePath f;
    f.scenario = &scenario;
    const std::size_t n = scenario.size();
    f.value.resize(n);
    f.left.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = consumption(scenario.times[i]);
        f.value[i] = wage.value[i] - c;
        f.left[i] = wage.left[i] - c;
    }
    return f;
}

} // namespace

SavingsPath simulate_savings(const MarketParams& params, const WagePath& wage,
                             const std::function<double(double)>& consumption,
                             const ScenarioPath& scenario) {
    const PiecewisePath forcing = net_income_path(wage, consumption, scenario);
    SavingsPath x;
    x.scenario = &scenario;
    x.value = linear_sde_solve_path(params.r_hat(), -params.pi_tilde, forcing, params.x_a,
                                    scenario);
    return x;
}

SavingsPath simulate_savings_euler(const MarketParams& params, const WagePath& wage,
                                   const std::function<double(double)>& consumption,
                                   const ScenarioPath& scenario) {
    SavingsPath x;
    x.scenario = &scenario;
    const std::size_t n = scenario.size();
    x.value.resize(n);
    double v = params.x_a;
    x.value[0] = v;
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = scenario.times[i] - scenario.times[i - 1];
        const double db = scenario.brownian[i] - scenario.brownian[i - 1];
        const double c = consumption(scenario.times[i - 1]);
        v += (params.r_hat() * v + wage.value[i - 1] - c) * dt - params.pi_tilde * v * db;
        x.value[i] = v;
    }
    return x;
}

std::vector<double> unit_shift_factor_path(const MarketParams& params,
                                           const ScenarioPath& scenario) {
    PiecewisePath ones;
    ones.scenario = &scenario;
    ones.value.assign(scenario.size(), 1.0);
    ones.left.assign(scenario.size(), 1.0);
    return linear_sde_solve_path(params.r_hat(), -params.pi_tilde, ones, 0.0, scenario);
}

WageLemmaReport wage_lemma_discrepancy(const MarketParams& params, int grid_steps,
                                       long n_paths, std::uint64_t seed) {
    const TimeGrid grid = params.make_grid(grid_steps);
    const int n_checkpoints = 10;
    if (grid_steps % n_checkpoints != 0) {
        throw std::invalid_argument("wage_lemma_discrepancy: grid_steps must be a multiple of 10");
    }

    WageLemmaReport report;
    report.n_paths = n_paths;
    report.seed = seed;
    std::vector<std::vector<double>> samples(n_checkpoints);
    for (auto& s : samples) s.reserve(static_cast<std::size_t>(n_paths));
    for (int j = 1; j <= n_checkpoints; ++j) {
        report.times.push_back(grid.node(j * grid_steps / n_checkpoints));
    }

    for (long i = 0; i < n_paths; ++i) {
        const ScenarioPath scenario = sample_scenario(grid, params.levy, path_seed(seed, i));
        const WagePath exact = simulate_wage_exact(params, scenario);
        const WagePath repr = wage_closed_form(params, scenario);
        for (int j = 0; j < n_checkpoints; ++j) {
            const std::size_t idx = scenario.index_at(report.times[static_cast<std::size_t>(j)]);
            samples[static_cast<std::size_t>(j)].push_back(repr.value[idx] / exact.value[idx]);
        }
    }

    const double drift_coef =
        -params.beta() * ((1.0 - params.eps) + std::log(params.eps));
    for (int j = 0; j < n_checkpoints; ++j) {
        const McEstimate est = summarize_sample(samples[static_cast<std::size_t>(j)], seed, 0.95);
        report.ratio_mean.push_back(est.mean);
        report.ratio_se.push_back(est.std_error);
        report.reference.push_back(
            std::exp(drift_coef * (report.times[static_cast<std::size_t>(j)] - params.a)));
        const double dev = std::abs(est.mean - 1.0);
        report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
        if (dev > std::max(5.0 * est.std_error, 1e-9)) report.drift_detected = true;
    }
    report.verdict =
        report.drift_detected
            ? "zeta-kernel wage representation drifts above the event-driven simulator; the "
              "per-term drift is exp(-beta*((1-eps)+log(eps))*(t-s)), so the pathwise ratio "
              "grows with t and is bounded by the reference curve (attained when w_a "
              "dominates); the event-driven simulator remains authoritative"
            : "zeta-kernel wage representation agrees with the event-driven simulator within "
              "quadrature tolerance";
    return report;
}

} // namespace ocp
