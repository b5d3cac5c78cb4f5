#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocp {

// Order-stable pairwise summation; the reduction tree depends only on the
// element order, so concurrent producers cannot change the result.
double pairwise_sum(std::span<const double> values);

// Standard normal quantile (inverse CDF), p in (0,1).
double normal_quantile(double p);

struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive Simpson on [a,b] to relative tolerance rel_tol (with abs_tol as a
// floor near zero integrals). Throws quadrature_error if the recursion depth
// budget is exhausted before the local error criterion is met.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol = 1e-300, int max_depth = 60);

// Trapezoid over tabulated samples; `right` holds the integrand value used at
// the left edge of each cell and `left` the value used at the right edge, so
// jump discontinuities located exactly at nodes integrate with left limits.
double trapezoid_tabulated(std::span<const double> times,
                           std::span<const double> right,
                           std::span<const double> left);

// Maximizes a smooth unimodal scalar function on [lo, hi]: golden-section to
// a coarse bracket, then one parabolic (three-point) refinement to get below
// the flat-top floating-point noise floor.
double maximize_scalar(const std::function<double(double)>& f, double lo, double hi);

// Classic RK4 for a scalar terminal-value ODE y' = rhs(t, y), integrated
// backward from t_end to t_start on n uniform steps. Returns y at the n+1
// grid nodes ordered from t_start to t_end.
std::vector<double> rk4_backward(const std::function<double(double, double)>& rhs,
                                 double t_start, double t_end, double y_end, int n_steps);

} // namespace ocp
