#pragma once

#include "ocp/consumption.hpp"
#include "ocp/market_params.hpp"
#include "ocp/mc.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ocp {

struct bracketing_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// z-dependence of one jump-adjoint component: zero, constant in z, or a
// general function integrated against the mark law.
class JumpAdjoint {
public:
    JumpAdjoint() = default;
    static JumpAdjoint zero() { return {}; }
    static JumpAdjoint constant(double v) {
        JumpAdjoint j;
        j.kind_ = Kind::Constant;
        j.value_ = v;
        return j;
    }
    static JumpAdjoint general(std::function<double(double)> f) {
        JumpAdjoint j;
        j.kind_ = Kind::General;
        j.fn_ = std::move(f);
        return j;
    }

    bool is_zero() const { return kind_ == Kind::Zero; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return value_; }
    double operator()(double z) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Constant: return value_;
            default: return fn_(z);
        }
    }

private:
    enum class Kind { Zero, Constant, General };
    Kind kind_ = Kind::Zero;
    double value_ = 0.0;
    std::function<double(double)> fn_;
};

// Adjoint state (p, q, r) of the two-dimensional savings/wage system. The
// solved plan has q = r = 0 and a deterministic first component.
struct AdjointState {
    std::array<double, 2> p{0.0, 0.0};
    std::array<double, 2> q{0.0, 0.0};
    JumpAdjoint r11, r12, r21, r22;
};

struct HamiltonianInput {
    double t = 0.0;
    double x = 0.0; // savings state
    double w = 0.0; // wage state
    double c = 0.0; // consumption control, >= 0
    AdjointState adjoint;
};

struct CheckReport {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<std::pair<double, double>> diagnostics; // (grid point, residual)
    std::string note;

    void finalize() { pass = max_residual <= tolerance; }
};

struct AdjointReport {
    CheckReport p1_identity;  // deterministic adjoint satisfies its ODE
    CheckReport p2_two_route; // RK4 vs variation-of-constants quadrature
    bool pass() const { return p1_identity.pass && p2_two_route.pass; }
};

// Current-value Hamiltonian of the consumption problem. The jump-adjoint
// integrals use the gain-mark law for the first train; the loss train is
// unmarked and enters with its total intensity.
double subjective_hamiltonian(const MarketParams& params, const HamiltonianInput& input);
double subjective_hamiltonian(const MarketParams& params, const HamiltonianInput& input,
                              const std::function<double(double)>& utility);

// H(mid) - (H(in1) + H(in2)) / 2 for midpoint-concavity probing.
double hamiltonian_midpoint_gap(const MarketParams& params, const HamiltonianInput& in1,
                                const HamiltonianInput& in2,
                                const std::function<double(double)>& utility);

// First-order condition u'(c(t)) = shadow price, relative residual over a
// 1000-point grid, tolerance 1e-12.
CheckReport foc_check(const MarketParams& params, const SoftSolution& solution);

// Deterministic adjoint system residuals for a given multiplier.
AdjointReport adjoint_residuals(const MarketParams& params, double lambda);

// Cumulative integral of a deterministic drift coefficient on a grid; the
// propagator exp(I(s) - I(t)) built from it satisfies the flow property
// exactly by construction.
std::vector<double> propagator_exponent(const std::function<double(double)>& drift_coef,
                                        const std::vector<double>& grid);

// Kernel representation of a linear scalar BSDE with deterministic
// coefficients and terminal value: Y(t) = xi Gamma(t,T) + int_t^T
// Gamma(t,s) phi(s) ds on the given grid. The volatility coefficient only
// feeds the suppressed martingale part and does not move Y here.
std::vector<double> linear_bsde_solve(const std::function<double(double)>& phi,
                                      const std::function<double(double)>& drift_coef,
                                      const std::function<double(double)>& vol_coef,
                                      double terminal, const std::vector<double>& grid);

// Random midpoint-concavity probes of the Hamiltonian in (x, w, c) and of
// the affine terminal payoff lambda (x - K).
CheckReport concavity_check(const MarketParams& params, const AdjointState& adjoint,
                            int n_probes, std::uint64_t seed);
CheckReport concavity_check(const MarketParams& params, const AdjointState& adjoint,
                            int n_probes, std::uint64_t seed,
                            const std::function<double(double)>& utility);

struct RootIterate {
    double lambda;
    double mean;
    double std_error;
};

struct RootFindResult {
    double lambda0 = 0.0;
    McEstimate final_estimate;
    std::vector<RootIterate> trace;
    bool noise_limited = false;
};

using ConstraintFn = std::function<McEstimate(double)>;

// Bisection for the scalar multiplier: stops when |mean| <= max(tol,
// 3 stderr) or the bracket narrows to tol. The constraint must be increasing
// in lambda and the bracket must straddle zero.
RootFindResult lagrange_root_find(const ConstraintFn& constraint_fn, double lambda_lo,
                                  double lambda_hi, double tol);

// Constraint lambda -> E[X_{c_lambda}(T+a)] - K over a frozen scenario set
// (common random numbers): the terminal value is affine in the consumption
// level, so each evaluation reweighs two cached path functionals.
ConstraintFn make_terminal_constraint(const MarketParams& params, int n_steps, long n_paths,
                                      std::uint64_t seed, double confidence = 0.95);

struct TerminalDiagnostic {
    double violation_rate = 0.0;            // fraction of paths with X(T+a) < K - 1e-9
    std::map<double, double> quantiles;     // level -> empirical quantile of X(T+a)
    long n_paths = 0;
    std::uint64_t seed = 0;
};

// Measures how often the almost-sure floor would be breached under a
// schedule tuned for the expectation constraint. Diagnostic only.
TerminalDiagnostic hard_constraint_diagnostic(const MarketParams& params,
                                              const ConsumptionSchedule& schedule, int n_steps,
                                              long n_paths, std::uint64_t seed);

} // namespace ocp
