#pragma once

// European options on a stock when the short rate follows the subordinated
// fractional Merton dynamics.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bond.hpp"
#include "mathfn.hpp"
#include "params.hpp"

namespace sfm {

/// V = 2H/Γ(α)^{2H} ∫_t^T σ̂²(s) s^{κ-1} ds with
/// σ̂²(s) = σ_s² + 2ρ σ_r σ_s (T-s) + σ_r² (T-s)².
struct VarianceDecomposition {
    double total_variance = 0.0;
    double kappa = 1.0;
    double maturity = 0.0;
    /// (σ_s², 2ρσ_rσ_s, σ_r²): coefficients of σ̂² in powers of (T-s).
    std::array<double, 3> coeffs{0.0, 0.0, 0.0};

    [[nodiscard]] double sigma_hat_sq(double s) const noexcept {
        const double u = maturity - s;
        return coeffs[0] + coeffs[1] * u + coeffs[2] * u * u;
    }
};

struct OptionQuote {
    double price = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    BondQuote bond;
    VarianceDecomposition variance;
    OptionKind kind = OptionKind::Call;
    /// True when V = 0 (t = T or all volatilities zero) and the intrinsic value was returned.
    bool intrinsic = false;
};

[[nodiscard]] inline VarianceDecomposition total_variance(const ModelParams& params, double t,
                                                          double maturity) {
    validate(params);
    detail::check_times(t, maturity);
    VarianceDecomposition out;
    out.kappa = params.kappa();
    out.maturity = maturity;
    out.coeffs = {params.sigma_s * params.sigma_s, 2.0 * params.rho * params.sigma_r * params.sigma_s,
                  params.sigma_r * params.sigma_r};
    if (t == maturity) return out;

    const double H = params.hurst;
    const double g = std::pow(gamma(params.alpha), 2.0 * H);
    const double v =
        2.0 * H / g * power_poly_integral({out.kappa, maturity, out.coeffs, t, maturity});

    // σ̂² = (σ_s + ρσ_r u)² + (1-ρ²)σ_r²u² >= 0, so only rounding can push V below zero.
    if (v < 0.0) {
        const double scale =
            2.0 * H / g *
            power_poly_integral({out.kappa, maturity,
                                 {out.coeffs[0], std::abs(out.coeffs[1]), out.coeffs[2]}, t, maturity});
        if (v < -64.0 * std::numeric_limits<double>::epsilon() * scale)
            throw NegativeVariance("total variance is negative: " + std::to_string(v));
        out.total_variance = 0.0;
    } else {
        out.total_variance = v;
    }
    return out;
}

namespace detail {

// Lognormal forward formula shared by every closed form: forward F = S/P, log-variance V.
inline void fill_black(OptionQuote& q, double S, double K, double log_bond, double V) {
    const double bond = std::exp(log_bond);
    if (V <= 0.0) {
        const double fwd = S - K * bond;
        q.intrinsic = true;
        const double inf = std::numeric_limits<double>::infinity();
        q.d1 = q.d2 = fwd > 0.0 ? inf : (fwd < 0.0 ? -inf : 0.0);
        q.price = q.kind == OptionKind::Call ? std::max(fwd, 0.0) : std::max(-fwd, 0.0);
        return;
    }
    const double sd = std::sqrt(V);
    q.d1 = (std::log(S / K) - log_bond + 0.5 * V) / sd;
    q.d2 = q.d1 - sd;
    if (q.kind == OptionKind::Call)
        q.price = S * norm_cdf(q.d1) - K * bond * norm_cdf(q.d2);
    else
        q.price = K * bond * norm_cdf(-q.d2) - S * norm_cdf(-q.d1);
}

inline double log_bond(const BondQuote& b, double r) { return -r * b.tau + b.f1; }

}  // namespace detail

/// Call: S Φ(d1) − K P Φ(d2); put: K P Φ(−d2) − S Φ(−d1), with
/// d1 = [ln(S/K) − ln P + V/2]/√V and d2 = d1 − √V.
/// When V = 0 the intrinsic forward value (S − K P)⁺ or (K P − S)⁺ is returned.
[[nodiscard]] inline OptionQuote price(const ModelParams& params, const MarketState& state,
                                       const Contract& contract) {
    validate(params);
    validate(state);
    validate(contract);
    OptionQuote q;
    q.kind = contract.kind;
    q.bond = bond_price(params, state.short_rate, contract.valuation_time, contract.maturity);
    q.variance = total_variance(params, contract.valuation_time, contract.maturity);
    detail::fill_black(q, state.stock, contract.strike, detail::log_bond(q.bond, state.short_rate),
                       q.variance.total_variance);
    return q;
}

/// Price from the reduced closed forms of `variant`, with their own
/// variance integrals: φ(t,T) = σ_s²τ + ρσ_rσ_sτ² + σ_r²τ³/3 for Merton,
/// 2H ∫σ̂² s^{2H−1} for FracMerton and Γ(α)^{-1} ∫σ̂² s^{α−1} for SubMerton.
/// SubFracMerton falls back to `price`. Throws VariantMismatch like f1_special.
[[nodiscard]] inline OptionQuote price_special(const ModelParams& params, const MarketState& state,
                                               const Contract& contract, ModelVariant variant) {
    validate(params);
    validate(state);
    validate(contract);
    const double t = contract.valuation_time;
    const double T = contract.maturity;
    const double f1 = f1_special(params, t, T, variant);
    if (variant == ModelVariant::SubFracMerton) return price(params, state, contract);

    const double tau = T - t;
    const double ss2 = params.sigma_s * params.sigma_s;
    const double cross = params.rho * params.sigma_r * params.sigma_s;
    const double sr2 = params.sigma_r * params.sigma_r;
    double V = 0.0;
    switch (variant) {
        case ModelVariant::Merton:
            V = ss2 * tau + cross * tau * tau + sr2 * tau * tau * tau / 3.0;
            break;
        case ModelVariant::FracMerton: {
            const double p = 2.0 * params.hurst;
            V = p * (ss2 * detail::kernel_moment(p, t, T, 0) + 2.0 * cross * detail::kernel_moment(p, t, T, 1) +
                     sr2 * detail::kernel_moment(p, t, T, 2));
            break;
        }
        case ModelVariant::SubMerton: {
            const double a = params.alpha;
            V = (ss2 * detail::kernel_moment(a, t, T, 0) + 2.0 * cross * detail::kernel_moment(a, t, T, 1) +
                 sr2 * detail::kernel_moment(a, t, T, 2)) /
                gamma(a);
            break;
        }
        case ModelVariant::SubFracMerton:
            break;
    }
    OptionQuote q;
    q.kind = contract.kind;
    q.bond = tau == 0.0 ? BondQuote{} : BondQuote{std::exp(-state.short_rate * tau + f1), f1, tau};
    q.variance.total_variance = std::max(V, 0.0);
    q.variance.kappa = params.kappa();
    q.variance.maturity = T;
    q.variance.coeffs = {ss2, 2.0 * cross, sr2};
    detail::fill_black(q, state.stock, contract.strike, detail::log_bond(q.bond, state.short_rate),
                       q.variance.total_variance);
    return q;
}

/// Valuation at t = 0 in the compact form with an average rate r̄ and volatility σ̄²:
/// C = S0 Φ(d̄1) − K P0 Φ(d̄2), d̄1 = [ln(S0/K) + r̄T + σ̄²T/2]/(σ̄√T).
///
/// Two σ̄² are reported. `sigma_bar_sq_printed` is the historically published
/// expression whose cross and quadratic terms lack a factor 2; `sigma_bar_sq`
/// equals V/T and reproduces `general` exactly. Both prices are exposed.
struct OriginQuote {
    OptionQuote general;
    double p0 = 1.0;
    double r_bar = 0.0;
    double sigma_bar_sq = 0.0;
    double sigma_bar_sq_printed = 0.0;
    double price = 0.0;          // compact form with sigma_bar_sq
    double price_printed = 0.0;  // compact form with sigma_bar_sq_printed
};

[[nodiscard]] inline OriginQuote price_at_origin(const ModelParams& params, const MarketState& state,
                                                 const Contract& contract) {
    if (contract.valuation_time != 0.0) throw DomainError("price_at_origin requires t = 0");
    if (!(contract.maturity > 0.0)) throw DomainError("price_at_origin requires maturity > 0");
    OriginQuote out;
    out.general = price(params, state, contract);

    const double T = contract.maturity;
    const double H = params.hurst;
    const double k = params.kappa();
    const double g = std::pow(gamma(params.alpha), 2.0 * H);
    const double sr2 = params.sigma_r * params.sigma_r;
    const double ss2 = params.sigma_s * params.sigma_s;
    const double cross = params.rho * params.sigma_r * params.sigma_s;

    const double bond_core = 2.0 * H / (g * k * (k + 1.0)) * (sr2 * T / (k + 2.0) - params.mu_r);
    out.p0 = std::exp(-state.short_rate * T + std::pow(T, k + 1.0) * bond_core);
    out.r_bar = state.short_rate - std::pow(T, k) * bond_core;

    const double lead = 2.0 * H * std::pow(T, k - 1.0) / (g * k);
    out.sigma_bar_sq_printed =
        lead * (ss2 + cross * T / (k + 1.0) + sr2 * T * T / ((k + 1.0) * (k + 2.0)));
    out.sigma_bar_sq =
        lead * (ss2 + 2.0 * cross * T / (k + 1.0) + 2.0 * sr2 * T * T / ((k + 1.0) * (k + 2.0)));

    auto compact = [&](double sig2) {
        OptionQuote q;
        q.kind = contract.kind;
        detail::fill_black(q, state.stock, contract.strike, -out.r_bar * T, std::max(sig2, 0.0) * T);
        return q.price;
    };
    out.price = compact(out.sigma_bar_sq);
    out.price_printed = compact(out.sigma_bar_sq_printed);
    return out;
}

struct TableRow {
    double spot = 0.0;
    double maturity = 0.0;
    ModelVariant variant = ModelVariant::Merton;
    double price = 0.0;
};

/// Call prices of all four variants on a spot × maturity grid. Each variant
/// takes `base` with alpha/hurst forced per `as_variant`. Rows are ordered by
/// spot, then maturity, then variant (Merton, SubMerton, FracMerton, SubFracMerton).
[[nodiscard]] inline std::vector<TableRow> price_table(const ModelParams& base,
                                                       const std::vector<double>& spots,
                                                       const std::vector<double>& maturities,
                                                       double strike, double r0, double t = 0.0) {
    std::vector<TableRow> rows;
    rows.reserve(spots.size() * maturities.size() * 4);
    for (double s : spots) {
        for (double T : maturities) {
            for (ModelVariant v : kAllVariants) {
                const ModelParams p = as_variant(base, v);
                const auto q = price(p, {r0, s}, {strike, T, t, OptionKind::Call});
                rows.push_back({s, T, v, q.price});
            }
        }
    }
    return rows;
}

}  // namespace sfm
