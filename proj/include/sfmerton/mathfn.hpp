#pragma once

// Special functions and the power-times-polynomial integrals of the model.
//
// Every integral the pricing formulas need has the shape
//
//     ∫_a^b [c0 + c1 (T-s) + c2 (T-s)^2] s^(κ-1) ds,
//
// which is evaluated exactly. `adaptive_quad` exists only as an independent
// cross-check for those closed forms.

#include <array>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace sfm {

/// Gamma function for x > 0.
[[nodiscard]] inline double gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("gamma: argument must be finite and > 0");
    return std::tgamma(x);
}

/// Standard normal CDF. Exact at ±inf; NaN is rejected.
[[nodiscard]] inline double norm_cdf(double x) {
    if (std::isnan(x)) throw DomainError("norm_cdf: NaN argument");
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// ∫_lower^upper [c0 + c1 (T-s) + c2 (T-s)^2] s^(kappa-1) ds with T = horizon.
struct PowerPolyIntegral {
    double kappa = 1.0;
    double horizon = 1.0;
    std::array<double, 3> coeffs{1.0, 0.0, 0.0};
    double lower = 0.0;
    double upper = 1.0;
};

namespace detail {

// ∫_a^b s^(p-1) ds for p > 0, 0 <= a <= b, without cancellation in b^p - a^p.
inline double power_segment(double p, double a, double b) {
    if (b <= 0.0 || a >= b) return 0.0;
    const double bp = std::pow(b, p);
    if (a <= 0.0) return bp / p;
    return -bp * std::expm1(p * std::log(a / b)) / p;
}

// Short intervals near the upper end (a >= b/2): write s = b - y and expand
// s^(κ-1) = b^(κ-1) Σ_n β_n (y/b)^n with β_n = (-1)^n binom(κ-1, n).
// The polynomial is re-expanded around w = T - b, so nothing cancels against T.
inline double power_poly_near(double kappa, double T, const std::array<double, 3>& c, double a,
                              double b) {
    const double h = b - a;
    const double x = h / b;  // <= 1/2
    const double w = T - b;
    const std::array<double, 3> r{c[0] + c[1] * w + c[2] * w * w, c[1] + 2.0 * c[2] * w, c[2]};

    std::array<double, 3> sums{0.0, 0.0, 0.0};
    double beta = 1.0;
    double xn = 1.0;
    for (int n = 0; n < 200; ++n) {
        double largest = 0.0;
        for (int m = 0; m < 3; ++m) {
            const double term = beta * xn / static_cast<double>(n + m + 1);
            sums[m] += term;
            largest = std::max(largest, std::abs(term));
        }
        if (n > 2 && largest <= 1e-18 * std::abs(sums[0])) break;
        beta *= (static_cast<double>(n) + 1.0 - kappa) / (static_cast<double>(n) + 1.0);
        xn *= x;
        if (beta == 0.0) break;  // integer kappa: the series terminates
    }
    const double scale = std::pow(b, kappa - 1.0) * h;
    return scale * (r[0] * sums[0] + r[1] * h * sums[1] + r[2] * h * h * sums[2]);
}

}  // namespace detail

/// Exact value of the integral described by `spec`.
///
/// Intervals with lower < upper/2 use the antiderivatives s^κ/κ, s^(κ+1)/(κ+1),
/// s^(κ+2)/(κ+2); short intervals near `upper` switch to a binomial series in
/// (upper - s)/upper so that both routes keep full relative precision. The
/// integrable singularity at s = 0 for κ < 1 is handled exactly.
[[nodiscard]] inline double power_poly_integral(const PowerPolyIntegral& spec) {
    const auto& [kappa, T, c, a, b] = spec;
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("power_poly_integral: kappa must be > 0");
    if (!(a >= 0.0 && a <= b && b <= T) || !std::isfinite(T))
        throw DomainError("power_poly_integral: need 0 <= lower <= upper <= horizon");
    if (a == b) return 0.0;
    if (a >= 0.5 * b) return detail::power_poly_near(kappa, T, c, a, b);

    // c0 + c1 (T-s) + c2 (T-s)^2 = q0 + q1 s + q2 s^2
    const double q0 = c[0] + c[1] * T + c[2] * T * T;
    const double q1 = -(c[1] + 2.0 * c[2] * T);
    const double q2 = c[2];
    return q0 * detail::power_segment(kappa, a, b) + q1 * detail::power_segment(kappa + 1.0, a, b) +
           q2 * detail::power_segment(kappa + 2.0, a, b);
}

/// Mirrored kernel form ∫_a^b (T-s)^(κ-1) (d0 + d1 s + d2 s^2) ds, 0 <= a <= b <= T,
/// reduced to `power_poly_integral` through s -> T - s.
[[nodiscard]] inline double mirrored_kernel_integral(double kappa, double horizon,
                                                     const std::array<double, 3>& d, double a,
                                                     double b) {
    if (!(a >= 0.0 && a <= b && b <= horizon))
        throw DomainError("mirrored_kernel_integral: need 0 <= a <= b <= horizon");
    return power_poly_integral({kappa, horizon, d, horizon - b, horizon - a});
}

enum class Singularity { None, Lower, Upper };

struct QuadOptions {
    /// Endpoint where the integrand behaves like |s - endpoint|^(exponent-1).
    Singularity singular = Singularity::None;
    /// Power used in the substitution s = endpoint ± u^(1/exponent); it also
    /// helps exponents above 1, where the integrand is bounded but not smooth.
    double exponent = 1.0;
    unsigned max_depth = 40;
};

namespace detail {

inline std::string to_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

struct QuadPanel {
    double a, b, value, error;
    unsigned depth;
    bool operator<(const QuadPanel& o) const { return error < o.error; }
};

// One 15-point Kronrod panel; the error is the gap to the embedded 7-point Gauss rule.
template <class F>
QuadPanel quad_panel(const F& f, double a, double b, unsigned depth) {
    using K15 = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G7 = boost::math::quadrature::gauss<double, 7>;
    const double k = K15::integrate(f, a, b, 0);
    const double g = G7::integrate(f, a, b);
    return {a, b, k, std::abs(k - g), depth};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7/15) estimate of ∫_a^b f.
///
/// `tol` is absolute for |result| <= 1 and relative above. Panels are bisected
/// worst-first; a panel is not split beyond `max_depth` halvings. Throws
/// ConvergenceError when the summed error estimate still exceeds `tol`.
inline double adaptive_quad(const std::function<double(double)>& f, double a, double b, double tol,
                            const QuadOptions& opt = {}) {
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("adaptive_quad: need finite a <= b");
    if (!(tol > 0.0)) throw DomainError("adaptive_quad: tol must be > 0");
    if (a == b) return 0.0;

    std::function<double(double)> g = f;
    double lo = a, hi = b;
    const double k = opt.exponent;
    if (opt.singular != Singularity::None && k > 0.0 && k != 1.0) {
        const double inv = 1.0 / k;
        const bool lower = opt.singular == Singularity::Lower;
        g = [&f, a, b, inv, lower](double u) {
            const double d = std::pow(u, inv);
            return f(lower ? a + d : b - d) * inv * std::pow(u, inv - 1.0);
        };
        lo = 0.0;
        hi = std::pow(b - a, k);
    }

    std::priority_queue<detail::QuadPanel> work;
    std::vector<detail::QuadPanel> done;
    auto first = detail::quad_panel(g, lo, hi, 0);
    double value = first.value, error = first.error;
    work.push(first);
    while (!work.empty() && error > tol * std::max(1.0, std::abs(value))) {
        const auto p = work.top();
        work.pop();
        if (p.depth >= opt.max_depth) {
            done.push_back(p);
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        const auto left = detail::quad_panel(g, p.a, mid, p.depth + 1);
        const auto right = detail::quad_panel(g, mid, p.b, p.depth + 1);
        value += left.value + right.value - p.value;
        error += left.error + right.error - p.error;
        work.push(left);
        work.push(right);
    }
    // Re-sum to shed the drift of the running totals.
    value = 0.0;
    error = 0.0;
    for (; !work.empty(); work.pop()) done.push_back(work.top());
    for (const auto& p : done) {
        value += p.value;
        error += p.error;
    }
    if (!std::isfinite(value) || !(error <= tol * std::max(1.0, std::abs(value))))
        throw ConvergenceError("adaptive_quad: tolerance " + detail::to_sci(tol) + " not met (error estimate " +
                               detail::to_sci(error) + ", value " + detail::to_sci(value) + ")");
    return value;
}

}  // namespace sfm
