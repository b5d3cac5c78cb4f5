#include "ocp/numerics.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstddef>

namespace ocp {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 64) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
    }
    static const boost::math::normal_distribution<double> unit{};
    return boost::math::quantile(unit, p);
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h) {
    return (h / 6.0) * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole,
                            double rel_tol, double abs_tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(fa, flm, fm, m - a);
    const double right = simpson_rule(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    const double tol = std::max(rel_tol * std::abs(left + right), abs_tol);
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (depth <= 0) {
        throw quadrature_error("adaptive_simpson: depth budget exhausted on [" +
                               std::to_string(a) + ", " + std::to_string(b) +
                               "], local error " + std::to_string(std::abs(delta)));
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, rel_tol, abs_tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, rel_tol, abs_tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson_rule(fa, fm, fb, b - a);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, max_depth);
}

double trapezoid_tabulated(std::span<const double> times,
                           std::span<const double> right,
                           std::span<const double> left) {
    if (times.size() != right.size() || times.size() != left.size()) {
        throw std::invalid_argument("trapezoid_tabulated: size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        sum += 0.5 * (times[i + 1] - times[i]) * (right[i] + left[i + 1]);
    }
    return sum;
}

double maximize_scalar(const std::function<double(double)>& f, double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("maximize_scalar: empty bracket");
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    // coarse golden-section; stopping early keeps comparisons above fp noise
    while (b - a > 1e-4 * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    // parabolic refinement at a spacing where curvature dominates rounding
    for (int pass = 0; pass < 3; ++pass) {
        const double h = 1e-5 * (1.0 + std::abs(x));
        const double f0 = f(x - h), f1 = f(x), f2 = f(x + h);
        const double denom = f0 - 2.0 * f1 + f2;
        if (denom >= 0.0 || !std::isfinite(denom)) break;
        const double step = 0.5 * h * (f0 - f2) / denom;
        if (!std::isfinite(step)) break;
        x += std::clamp(step, -20.0 * h, 20.0 * h);
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(x))) break;
    }
    return std::clamp(x, lo, hi);
}

std::vector<double> rk4_backward(const std::function<double(double, double)>& rhs,
                                 double t_start, double t_end, double y_end, int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("rk4_backward: n_steps must be >= 1");
    std::vector<double> y(static_cast<std::size_t>(n_steps) + 1);
    const double h = (t_end - t_start) / n_steps;
    y[static_cast<std::size_t>(n_steps)] = y_end;
    double yi = y_end;
    for (int i = n_steps; i > 0; --i) {
        const double t = t_start + h * i;
        const double k1 = rhs(t, yi);
        const double k2 = rhs(t - 0.5 * h, yi - 0.5 * h * k1);
        const double k3 = rhs(t - 0.5 * h, yi - 0.5 * h * k2);
        const double k4 = rhs(t - h, yi - h * k3);
        yi -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y[static_cast<std::size_t>(i) - 1] = yi;
    }
    return y;
}

} // namespace ocp
