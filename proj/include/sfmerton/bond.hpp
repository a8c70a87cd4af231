#pragma once

// Zero-coupon bond P(r, t, T) = exp(-r τ + f1), τ = T - t.

#include <cmath>
#include <string>

#include "mathfn.hpp"
#include "params.hpp"

namespace sfm {

struct BondQuote {
    double price = 1.0;
    double f1 = 0.0;
    double tau = 0.0;
};

namespace detail {

inline void check_times(double t, double maturity) {
    if (!std::isfinite(t) || !std::isfinite(maturity) || !(t >= 0.0 && t <= maturity))
        throw DomainError("need 0 <= t <= maturity");
}

// ∫_t^T u^(p-1) (T-u)^j du by plain binomial expansion of (T-u)^j. Used by the
// reduced closed forms as a route independent of power_poly_integral.
inline double kernel_moment(double p, double t, double T, int j) {
    const double dp0 = (std::pow(T, p) - std::pow(t, p)) / p;
    const double dp1 = (std::pow(T, p + 1.0) - std::pow(t, p + 1.0)) / (p + 1.0);
    const double dp2 = (std::pow(T, p + 2.0) - std::pow(t, p + 2.0)) / (p + 2.0);
    switch (j) {
        case 0: return dp0;
        case 1: return T * dp0 - dp1;
        case 2: return T * T * dp0 - 2.0 * T * dp1 + dp2;
        default: throw DomainError("kernel_moment: j must be 0, 1 or 2");
    }
}

}  // namespace detail

/// f1(τ) = H/Γ(α)^{2H} ∫_0^τ (T-s)^{κ-1} (σ_r² s² - 2 μ_r s) ds, κ = 2αH.
///
/// Takes the absolute maturity: the kernel depends on T, not only on τ.
[[nodiscard]] inline double f1_general(const ModelParams& params, double t, double maturity) {
    validate(params);
    detail::check_times(t, maturity);
    if (t == maturity) return 0.0;
    const double H = params.hurst;
    const double g = std::pow(gamma(params.alpha), 2.0 * H);
    const double integral = mirrored_kernel_integral(
        params.kappa(), maturity, {0.0, -2.0 * params.mu_r, params.sigma_r * params.sigma_r}, 0.0,
        maturity - t);
    return H / g * integral;
}

/// Bond paying one unit at `maturity`, valued at time t with short rate r.
[[nodiscard]] inline BondQuote bond_price(const ModelParams& params, double r, double t,
                                          double maturity) {
    detail::require_finite(r, "short rate");
    const double f1 = f1_general(params, t, maturity);
    if (t == maturity) return {1.0, 0.0, 0.0};
    const double tau = maturity - t;
    return {std::exp(-r * tau + f1), f1, tau};
}

/// f1 from the reduced closed form of `variant`:
///   Merton        σ_r² τ³/6 − μ_r τ²/2
///   FracMerton    H σ_r² ∫(T−s)^{2H−1}s² − 2H μ_r ∫(T−s)^{2H−1}s, and at t = 0
///                 σ_r² T^{2H+2}/((2H+1)(2H+2)) − μ_r T^{2H+1}/(2H+1)
///   SubMerton     σ_r²/(2Γ(α)) ∫(T−s)^{α−1}s² − μ_r/Γ(α) ∫(T−s)^{α−1}s
///   SubFracMerton has no reduction; the general form is returned.
/// Throws VariantMismatch when `params` classify differently.
[[nodiscard]] inline double f1_special(const ModelParams& params, double t, double maturity,
                                       ModelVariant variant) {
    validate(params);
    detail::check_times(t, maturity);
    if (classify(params) != variant)
        throw VariantMismatch(std::string("parameters do not describe the ") +
                              std::string(to_string(variant)) + " variant");
    const double T = maturity;
    const double tau = T - t;
    const double sr2 = params.sigma_r * params.sigma_r;
    const double mu = params.mu_r;
    const double H = params.hurst;

    switch (variant) {
        case ModelVariant::Merton:
            return sr2 * tau * tau * tau / 6.0 - 0.5 * mu * tau * tau;
        case ModelVariant::FracMerton:
            if (t == 0.0) {
                return sr2 * std::pow(T, 2.0 * H + 2.0) / ((2.0 * H + 1.0) * (2.0 * H + 2.0)) -
                       mu * std::pow(T, 2.0 * H + 1.0) / (2.0 * H + 1.0);
            }
            // s -> T - u maps ∫_0^τ (T-s)^{2H-1} s^j ds onto ∫_t^T u^{2H-1} (T-u)^j du
            return H * sr2 * detail::kernel_moment(2.0 * H, t, T, 2) -
                   2.0 * H * mu * detail::kernel_moment(2.0 * H, t, T, 1);
        case ModelVariant::SubMerton: {
            const double ga = gamma(params.alpha);
            return 0.5 * sr2 / ga * detail::kernel_moment(params.alpha, t, T, 2) -
                   mu / ga * detail::kernel_moment(params.alpha, t, T, 1);
        }
        case ModelVariant::SubFracMerton:
            return f1_general(params, t, maturity);
    }
    return f1_general(params, t, maturity);
}

}  // namespace sfm
