#pragma once

// Finite-difference residuals of the closed-form bond and call under their
// pricing PDEs, with grid-refinement convergence orders.
//
// Derivatives of the closed forms are taken numerically (central differences
// of the pricing functions) so that the check stays independent of the
// algebra that produced them. At every refinement level the residual is
// sampled at the interior nodes of the base grid; these nodes belong to every
// finer grid, and only the stencil spacing shrinks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bond.hpp"
#include "coefficients.hpp"
#include "params.hpp"
#include "pricing.hpp"

namespace sfm {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

struct PdeGrid {
    Interval t_range{0.05, 0.25};
    Interval S_range{2.0, 4.0};
    Interval r_range{0.0, 0.6};
    int n_t = 11;
    int n_S = 11;
    int n_r = 11;
};

struct ResidualReport {
    std::vector<double> grid_h;        // largest axis spacing per level, strictly decreasing
    std::vector<double> max_residual;  // max |residual| over sampled nodes per level
    double est_order = std::numeric_limits<double>::quiet_NaN();
};

/// Which PDE the call is checked against.
enum class PdeForm {
    /// Full equation with mixed term 2ρ σ̃_r σ̃_s S ∂²C/∂S∂r.
    Fractional,
    /// Same, but with the mixed term printed without the factor S.
    FractionalPrintedMixed,
    /// ρ = 0, constant rate: ∂C/∂t + σ̃_s² S² ∂²C/∂S² + rS ∂C/∂S − rC.
    ConstantRate,
    /// ∂C/∂t + ½σ_s² S² ∂²C/∂S² + rS ∂C/∂S − rC.
    BlackScholes,
};

/// Least-squares slope of log(residual) against log(h).
/// Throws DegenerateFit when a residual is non-finite or at the rounding floor.
[[nodiscard]] inline double estimate_order(const ResidualReport& report) {
    constexpr double kFloor = 1e-13;
    if (report.grid_h.size() != report.max_residual.size())
        throw DomainError("estimate_order: grid_h and max_residual differ in length");
    for (double r : report.max_residual)
        if (!std::isfinite(r) || r <= kFloor)
            throw DegenerateFit("estimate_order: residual at floating-point floor (" + std::to_string(r) + ")");
    const auto n = report.grid_h.size();
    if (n < 3) throw DomainError("estimate_order: need at least 3 refinement levels");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(report.grid_h[i]);
        my += std::log(report.max_residual[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(report.grid_h[i]) - mx;
        sxy += dx * (std::log(report.max_residual[i]) - my);
        sxx += dx * dx;
    }
    if (sxx <= 0.0) throw DegenerateFit("estimate_order: grid spacings are not distinct");
    return sxy / sxx;
}

namespace detail {

inline void check_grid(const PdeGrid& g, double maturity) {
    auto axis = [](const Interval& iv, int n, const char* name) {
        if (n < 5) throw DomainError(std::string("PdeGrid: n_") + name + " must be >= 5");
        if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw DomainError(std::string("PdeGrid: empty ") + name + " range");
    };
    axis(g.t_range, g.n_t, "t");
    axis(g.S_range, g.n_S, "S");
    axis(g.r_range, g.n_r, "r");
    if (!(g.t_range.lo > 0.0)) throw DomainError("PdeGrid: t range must exclude t = 0");
    if (!(g.t_range.hi < maturity)) throw DomainError("PdeGrid: t range must end before maturity");
    if (!(g.S_range.lo > 0.0)) throw DomainError("PdeGrid: S range must be positive");
}

inline double spacing(const Interval& iv, int n) { return (iv.hi - iv.lo) / (n - 1); }
inline double node(const Interval& iv, int n, int i) { return iv.lo + i * spacing(iv, n); }

}  // namespace detail

/// Residual of ∂P/∂t + 2a(t)μ_r ∂P/∂r + a(t)σ_r² ∂²P/∂r² − rP for the closed-form
/// bond, a(t) = H t^{2H−1}(t^{α−1}/Γ(α))^{2H}. Uses the (r, t) axes of `grid`.
[[nodiscard]] inline ResidualReport bond_pde_residual(const ModelParams& params, double maturity,
                                                      const PdeGrid& grid, int levels = 3) {
    validate(params);
    detail::check_grid(grid, maturity);
    const double ht0 = detail::spacing(grid.t_range, grid.n_t);
    const double hr0 = detail::spacing(grid.r_range, grid.n_r);

    ResidualReport rep;
    for (int level = 0; level < levels; ++level) {
        const double f = std::ldexp(1.0, -level);
        const double ht = ht0 * f;
        const double hr = hr0 * f;
        double worst = 0.0;
        for (int it = 1; it + 1 < grid.n_t; ++it) {
            const double t = detail::node(grid.t_range, grid.n_t, it);
            const double a = time_scale(params, t);
            for (int ir = 1; ir + 1 < grid.n_r; ++ir) {
                const double r = detail::node(grid.r_range, grid.n_r, ir);
                auto P = [&](double rr, double tt) { return bond_price(params, rr, tt, maturity).price; };
                const double p0 = P(r, t);
                const double pt = (P(r, t + ht) - P(r, t - ht)) / (2.0 * ht);
                const double pr = (P(r + hr, t) - P(r - hr, t)) / (2.0 * hr);
                const double prr = (P(r + hr, t) - 2.0 * p0 + P(r - hr, t)) / (hr * hr);
                const double res = pt + 2.0 * a * params.mu_r * pr +
                                   a * params.sigma_r * params.sigma_r * prr - r * p0;
                worst = std::max(worst, std::abs(res));
            }
        }
        rep.grid_h.push_back(std::max(ht, hr));
        rep.max_residual.push_back(worst);
    }
    rep.est_order = estimate_order(rep);
    return rep;
}

/// Residual of the closed-form call (or put) under the chosen PDE form on
/// the (S, r, t) grid. `contract.valuation_time` is ignored.
[[nodiscard]] inline ResidualReport option_pde_residual(const ModelParams& params, const Contract& contract,
                                                        const PdeGrid& grid,
                                                        PdeForm form = PdeForm::Fractional,
                                                        int levels = 3) {
    validate(params);
    detail::check_grid(grid, contract.maturity);
    const double ht0 = detail::spacing(grid.t_range, grid.n_t);
    const double hS0 = detail::spacing(grid.S_range, grid.n_S);
    const double hr0 = detail::spacing(grid.r_range, grid.n_r);
    const bool uses_rate = form == PdeForm::Fractional || form == PdeForm::FractionalPrintedMixed;

    auto C = [&](double S, double r, double t) {
        Contract c = contract;
        c.valuation_time = t;
        return price(params, {r, S}, c).price;
    };

    ResidualReport rep;
    for (int level = 0; level < levels; ++level) {
        const double f = std::ldexp(1.0, -level);
        const double ht = ht0 * f;
        const double hS = hS0 * f;
        const double hr = hr0 * f;
        double worst = 0.0;
        for (int it = 1; it + 1 < grid.n_t; ++it) {
            const double t = detail::node(grid.t_range, grid.n_t, it);
            const double a = time_scale(params, t);
            const auto lv = local_volatility(params, t);
            for (int ir = 1; ir + 1 < grid.n_r; ++ir) {
                const double r = detail::node(grid.r_range, grid.n_r, ir);
                for (int is = 1; is + 1 < grid.n_S; ++is) {
                    const double S = detail::node(grid.S_range, grid.n_S, is);
                    const double c0 = C(S, r, t);
                    const double cSp = C(S + hS, r, t);
                    const double cSm = C(S - hS, r, t);
                    const double ct = (C(S, r, t + ht) - C(S, r, t - ht)) / (2.0 * ht);
                    const double cS = (cSp - cSm) / (2.0 * hS);
                    const double cSS = (cSp - 2.0 * c0 + cSm) / (hS * hS);

                    double res = ct + r * S * cS - r * c0;
                    switch (form) {
                        case PdeForm::BlackScholes:
                            res += 0.5 * params.sigma_s * params.sigma_s * S * S * cSS;
                            break;
                        case PdeForm::ConstantRate:
                        case PdeForm::Fractional:
                        case PdeForm::FractionalPrintedMixed:
                            res += lv.stock * lv.stock * S * S * cSS;
                            break;
                    }
                    if (uses_rate) {
                        const double crp = C(S, r + hr, t);
                        const double crm = C(S, r - hr, t);
                        const double cr = (crp - crm) / (2.0 * hr);
                        const double crr = (crp - 2.0 * c0 + crm) / (hr * hr);
                        const double cSr = (C(S + hS, r + hr, t) - C(S + hS, r - hr, t) -
                                            C(S - hS, r + hr, t) + C(S - hS, r - hr, t)) /
                                           (4.0 * hS * hr);
                        const double mixed = 2.0 * params.rho * lv.rate * lv.stock * cSr;
                        res += lv.rate * lv.rate * crr + 2.0 * a * params.mu_r * cr +
                               (form == PdeForm::Fractional ? S * mixed : mixed);
                    }
                    worst = std::max(worst, std::abs(res));
                }
            }
        }
        rep.grid_h.push_back(std::max({ht, hS, uses_rate ? hr : 0.0}));
        rep.max_residual.push_back(worst);
    }
    rep.est_order = estimate_order(rep);
    return rep;
}

}  // namespace sfm
