#include "ocp/verification.hpp"

#include "ocp/numerics.hpp"
#include "ocp/rng.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

namespace ocp {

namespace {

// int z r(z) nu1(dz): intensity times the mark mean when r is constant in z,
// otherwise 32-point Gauss-Legendre against the mark law (CDF substitution
// for exponential marks).
double gain_jump_integral(const MarketParams& params, const JumpAdjoint& r21) {
    if (r21.is_zero() || params.levy.n1_intensity == 0.0) return 0.0;
    const MarkDistribution& mark = params.levy.n1_mark;
    if (r21.is_constant()) return params.alpha() * r21.constant_value();
    if (mark.kind == MarkKind::Constant) {
        return params.levy.n1_intensity * mark.param * r21(mark.param);
    }
    using gauss32 = boost::math::quadrature::gauss<double, 32>;
    const double mean = mark.param;
    auto integrand = [&](double u) {
        const double z = -mean * std::log1p(-u);
        return z * r21(z);
    };
    return params.levy.n1_intensity * gauss32::integrate(integrand, 0.0, 1.0);
}

// int r(z) nu2(dz): the loss train is unmarked, its measure is a unit point
// mass scaled by the intensity.
double loss_jump_integral(const MarketParams& params, const JumpAdjoint& r22) {
    if (r22.is_zero() || params.levy.n2_intensity == 0.0) return 0.0;
    if (r22.is_constant()) return params.beta() * r22.constant_value();
    return params.beta() * r22(1.0);
}

std::function<double(double)> crra_utility_fn(const MarketParams& params) {
    const CrraUtility u{params.gamma};
    return [u, gamma = params.gamma](double c) {
        if (c == 0.0 && gamma > 0.0) return 0.0; // continuous extension
        return u.value(c);
    };
}

} // namespace

double subjective_hamiltonian(const MarketParams& params, const HamiltonianInput& input,
                              const std::function<double(double)>& utility) {
    if (input.c < 0.0) throw std::invalid_argument("subjective_hamiltonian: c must be >= 0");
    const AdjointState& adj = input.adjoint;
    const double drift_x = (params.r_n - params.pi_hat) * input.x + input.w - input.c;
    const double drift_w = params.alpha() - params.kappa() * input.w;
    return utility(input.c) + adj.p[0] * drift_x + adj.p[1] * drift_w -
           adj.q[0] * params.pi_tilde * input.x - adj.q[1] * params.pi_tilde * input.w +
           gain_jump_integral(params, adj.r21) -
           (1.0 - params.eps) * input.w * loss_jump_integral(params, adj.r22);
}

double subjective_hamiltonian(const MarketParams& params, const HamiltonianInput& input) {
    return subjective_hamiltonian(params, input, crra_utility_fn(params));
}

double hamiltonian_midpoint_gap(const MarketParams& params, const HamiltonianInput& in1,
                                const HamiltonianInput& in2,
                                const std::function<double(double)>& utility) {
    HamiltonianInput mid = in1;
    mid.t = 0.5 * (in1.t + in2.t);
    mid.x = 0.5 * (in1.x + in2.x);
    mid.w = 0.5 * (in1.w + in2.w);
    mid.c = 0.5 * (in1.c + in2.c);
    const double h1 = subjective_hamiltonian(params, in1, utility);
    const double h2 = subjective_hamiltonian(params, in2, utility);
    const double hm = subjective_hamiltonian(params, mid, utility);
    return hm - 0.5 * (h1 + h2);
}

CheckReport foc_check(const MarketParams& params, const SoftSolution& solution) {
    const CrraUtility u{params.gamma};
    const int n = 1000;
    CheckReport report;
    report.name = "foc_identity";
    report.tolerance = 1e-12;
    for (int i = 0; i <= n; ++i) {
        const double t = params.a + params.T * (static_cast<double>(i) / n);
        const double price = savings_shadow_price(params, solution.lambda_star, t);
        const double residual = std::abs(u.marginal(solution.consumption_at(t)) - price) / price;
        if (i % 50 == 0) report.diagnostics.emplace_back(t, residual);
        report.max_residual = std::max(report.max_residual, residual);
    }
    report.finalize();
    return report;
}

AdjointReport adjoint_residuals(const MarketParams& params, double lambda) {
    AdjointReport out;
    const double t_end = params.a + params.T;
    const double r_hat = params.r_hat();
    const double delta = params.delta;

    // (a) deterministic first adjoint: finite-difference derivative of the
    // closed form against the ODE right-hand side, terminal value exact
    {
        CheckReport& rep = out.p1_identity;
        rep.name = "adjoint_p1_ode";
        rep.tolerance = 1e-10 * std::abs(lambda);
        const int n = 1000;
        const double h = 1e-5;
        for (int i = 0; i <= n; ++i) {
            // keep a centered stencil by pulling endpoint probes inward
            const double t = std::clamp(params.a + params.T * (static_cast<double>(i) / n),
                                        params.a + h, t_end - h);
            const double deriv = (savings_shadow_price(params, lambda, t + h) -
                                  savings_shadow_price(params, lambda, t - h)) /
                                 (2.0 * h);
            const double residual =
                std::abs(deriv + (r_hat - delta) * savings_shadow_price(params, lambda, t));
            if (i % 50 == 0) rep.diagnostics.emplace_back(t, residual);
            rep.max_residual = std::max(rep.max_residual, residual);
        }
        const double terminal_gap = std::abs(savings_shadow_price(params, lambda, t_end) - lambda);
        rep.max_residual = std::max(rep.max_residual, terminal_gap);
        rep.note = "terminal value gap " + std::to_string(terminal_gap);
        rep.finalize();
    }

    // (b) second adjoint: backward RK4 of p2' = -p1 + (pi_hat + beta(1-eps) +
    // delta) p2, p2(T+a) = 0, against the variation-of-constants integral
    {
        CheckReport& rep = out.p2_two_route;
        rep.name = "adjoint_p2_rk4_vs_quadrature";
        rep.tolerance = 1e-8;
        const double coef = params.pi_hat + params.beta() * (1.0 - params.eps) + delta;
        auto rhs = [&](double t, double p2) {
            return -savings_shadow_price(params, lambda, t) + coef * p2;
        };
        const int n_rk = 4000;
        const std::vector<double> p2 = rk4_backward(rhs, params.a, t_end, 0.0, n_rk);
        const int n_samples = 20;
        for (int j = 0; j < n_samples; ++j) {
            const int node = j * n_rk / n_samples;
            const double t = params.a + (t_end - params.a) * (static_cast<double>(node) / n_rk);
            const double voc = adaptive_simpson(
                [&](double s) {
                    return savings_shadow_price(params, lambda, s) * std::exp(-coef * (s - t));
                },
                t, t_end, 1e-12, 1e-16);
            const double rel = std::abs(p2[static_cast<std::size_t>(node)] - voc) /
                               std::max(std::abs(voc), 1e-12 * std::abs(lambda));
            rep.diagnostics.emplace_back(t, rel);
            rep.max_residual = std::max(rep.max_residual, rel);
        }
        rep.note = "p2(a) = " + std::to_string(p2.front()) +
                   ", p2(T+a) = " + std::to_string(p2.back());
        rep.finalize();
    }
    return out;
}

std::vector<double> propagator_exponent(const std::function<double(double)>& drift_coef,
                                        const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("propagator_exponent: need >= 2 grid nodes");
    std::vector<double> expo(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double h = grid[i] - grid[i - 1];
        const double mid = 0.5 * (grid[i - 1] + grid[i]);
        expo[i] = expo[i - 1] +
                  (h / 6.0) * (drift_coef(grid[i - 1]) + 4.0 * drift_coef(mid) + drift_coef(grid[i]));
    }
    return expo;
}

std::vector<double> linear_bsde_solve(const std::function<double(double)>& phi,
                                      const std::function<double(double)>& drift_coef,
                                      const std::function<double(double)>& /*vol_coef*/,
                                      double terminal, const std::vector<double>& grid) {
    const std::vector<double> expo = propagator_exponent(drift_coef, grid);
    const std::size_t n = grid.size();

    // right-cumulative int_t^T e^{I(s)} phi(s) ds by per-cell Simpson; the
    // midpoint exponent comes from a half-cell Simpson step
    std::vector<double> tail(n, 0.0);
    for (std::size_t i = n - 1; i > 0; --i) {
        const double h = grid[i] - grid[i - 1];
        const double mid = 0.5 * (grid[i - 1] + grid[i]);
        const double expo_mid =
            expo[i - 1] + (h / 12.0) * (drift_coef(grid[i - 1]) +
                                        4.0 * drift_coef(0.5 * (grid[i - 1] + mid)) +
                                        drift_coef(mid));
        const double cell = (h / 6.0) * (std::exp(expo[i - 1]) * phi(grid[i - 1]) +
                                         4.0 * std::exp(expo_mid) * phi(mid) +
                                         std::exp(expo[i]) * phi(grid[i]));
        tail[i - 1] = tail[i] + cell;
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::exp(-expo[i]) * (terminal * std::exp(expo[n - 1]) + tail[i]);
    }
    return y;
}

CheckReport concavity_check(const MarketParams& params, const AdjointState& adjoint,
                            int n_probes, std::uint64_t seed,
                            const std::function<double(double)>& utility) {
    CheckReport report;
    report.name = "concavity_probes";
    report.tolerance = 1e-10;

    auto rng = make_engine(derive_seed(seed, 0, 7));
    std::uniform_real_distribution<double> state(-5.0, 5.0);
    std::uniform_real_distribution<double> control(0.05, 10.0);
    std::uniform_real_distribution<double> time_draw(params.a, params.a + params.T);

    double worst = 0.0; // most negative midpoint gap
    for (int i = 0; i < n_probes; ++i) {
        HamiltonianInput in1{time_draw(rng), state(rng), state(rng), control(rng), adjoint};
        HamiltonianInput in2{in1.t, state(rng), state(rng), control(rng), adjoint};
        const double gap = hamiltonian_midpoint_gap(params, in1, in2, utility);
        worst = std::min(worst, gap);
    }
    // affine terminal payoff lambda (x - K): midpoint value must match the
    // average exactly
    std::uniform_real_distribution<double> lam_draw(0.1, 10.0);
    double worst_g = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        const double lam = lam_draw(rng);
        const double x1 = state(rng), x2 = state(rng);
        auto g = [&](double x) { return lam * (x - params.K); };
        worst_g = std::max(worst_g, std::abs(g(0.5 * (x1 + x2)) - 0.5 * (g(x1) + g(x2))));
    }
    report.max_residual = std::max(-worst, worst_g);
    report.note = "hamiltonian worst midpoint gap " + std::to_string(worst) +
                  ", terminal payoff worst gap " + std::to_string(worst_g);
    report.finalize();
    return report;
}

CheckReport concavity_check(const MarketParams& params, const AdjointState& adjoint,
                            int n_probes, std::uint64_t seed) {
    return concavity_check(params, adjoint, n_probes, seed, crra_utility_fn(params));
}

RootFindResult lagrange_root_find(const ConstraintFn& constraint_fn, double lambda_lo,
                                  double lambda_hi, double tol) {
    if (!(lambda_lo < lambda_hi)) throw std::invalid_argument("lagrange_root_find: empty bracket");
    if (!(tol > 0.0)) throw std::invalid_argument("lagrange_root_find: tol must be > 0");

    RootFindResult result;
    const McEstimate at_lo = constraint_fn(lambda_lo);
    const McEstimate at_hi = constraint_fn(lambda_hi);
    result.trace.push_back({lambda_lo, at_lo.mean, at_lo.std_error});
    result.trace.push_back({lambda_hi, at_hi.mean, at_hi.std_error});
    if (!(at_lo.mean < 0.0 && at_hi.mean > 0.0)) {
        throw bracketing_error("lagrange_root_find: bracket does not straddle the constraint root");
    }

    double lo = lambda_lo, hi = lambda_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const McEstimate est = constraint_fn(mid);
        result.trace.push_back({mid, est.mean, est.std_error});
        if (std::abs(est.mean) <= std::max(tol, 3.0 * est.std_error)) {
            result.lambda0 = mid;
            result.final_estimate = est;
            result.noise_limited = std::abs(est.mean) > tol && 3.0 * est.std_error > tol;
            return result;
        }
        if (est.mean > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double mid = 0.5 * (lo + hi);
    const McEstimate est = constraint_fn(mid);
    result.trace.push_back({mid, est.mean, est.std_error});
    result.lambda0 = mid;
    result.final_estimate = est;
    result.noise_limited = std::abs(est.mean) > tol && 3.0 * est.std_error > tol;
    return result;
}

ConstraintFn make_terminal_constraint(const MarketParams& params, int n_steps, long n_paths,
                                      std::uint64_t seed, double confidence) {
    params.validate();
    const TimeGrid grid = params.make_grid(n_steps);
    const auto [r_hat, gamma_hat] = subjective_rates(params);
    const double t_end = params.a + params.T;

    // per-path split of the affine map lambda -> X(T+a):
    //   base: terminal savings with zero consumption
    //   weight: terminal value of a unit consumption profile e^{-gamma_hat (T+a-t)}
    auto base = std::make_shared<std::vector<double>>();
    auto weight = std::make_shared<std::vector<double>>();
    base->reserve(static_cast<std::size_t>(n_paths));
    weight->reserve(static_cast<std::size_t>(n_paths));

    for (long i = 0; i < n_paths; ++i) {
        const ScenarioPath scenario = sample_scenario(grid, params.levy, path_seed(seed, i));
        const WagePath wage = simulate_wage_exact(params, scenario);
        const SavingsPath zero_c =
            simulate_savings(params, wage, [](double) { return 0.0; }, scenario);
        base->push_back(zero_c.value.back());

        PiecewisePath profile;
        profile.scenario = &scenario;
        profile.value.resize(scenario.size());
        for (std::size_t k = 0; k < scenario.size(); ++k) {
            profile.value[k] = std::exp(-gamma_hat * (t_end - scenario.times[k]));
        }
        profile.left = profile.value;
        weight->push_back(
            linear_sde_solve_path(r_hat, -params.pi_tilde, profile, 0.0, scenario).back());
    }

    const CrraUtility u{params.gamma};
    const double floor = params.K;
    return [params, u, floor, base, weight, seed, confidence](double lambda) {
        const double level = u.inverse_marginal(lambda); // c_lambda(T+a)
        std::vector<double> values(base->size());
        for (std::size_t i = 0; i < base->size(); ++i) {
            values[i] = (*base)[i] - level * (*weight)[i] - floor;
        }
        return summarize_sample(values, seed, confidence);
    };
}

TerminalDiagnostic hard_constraint_diagnostic(const MarketParams& params,
                                              const ConsumptionSchedule& schedule, int n_steps,
                                              long n_paths, std::uint64_t seed) {
    const TimeGrid grid = params.make_grid(n_steps);
    std::vector<double> terminal = mc_sample(
        grid, params.levy, n_paths, seed, [&](const ScenarioPath& scenario) {
            const WagePath wage = simulate_wage_exact(params, scenario);
            return simulate_savings(params, wage, [&](double t) { return schedule.at(t); },
                                    scenario)
                .value.back();
        });

    TerminalDiagnostic diag;
    diag.n_paths = n_paths;
    diag.seed = seed;
    long violations = 0;
    for (double x : terminal) {
        if (x < params.K - 1e-9) ++violations;
    }
    diag.violation_rate = static_cast<double>(violations) / static_cast<double>(n_paths);

    std::sort(terminal.begin(), terminal.end());
    for (double q : {0.01, 0.05, 0.5, 0.95, 0.99}) {
        const double pos = q * static_cast<double>(terminal.size() - 1);
        const std::size_t idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        const double value = (idx + 1 < terminal.size())
                                 ? terminal[idx] * (1.0 - frac) + terminal[idx + 1] * frac
                                 : terminal[idx];
        diag.quantiles[q] = value;
    }
    return diag;
}

} // namespace ocp
