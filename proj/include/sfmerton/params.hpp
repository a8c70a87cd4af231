#pragma once

// Model parameters, contracts, market state, and the four model variants.

#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace sfm {

/// Constants of the subordinated short-rate / stock model.
///
/// The short rate runs as r = r0 + mu_r*tau + sigma_r*B1(tau) and the stock as a
/// geometric process driven by B2, both on the operational clock tau = T_alpha(t).
/// B1 and B2 are fractional Brownian motions with Hurst index `hurst` and
/// correlation `rho`. `mu_s` only enters path simulation.
struct ModelParams {
    double alpha = 1.0;
    double hurst = 0.5;
    double mu_r = 0.0;
    double sigma_r = 0.0;
    double mu_s = 0.0;
    double sigma_s = 0.0;
    double rho = 0.0;

    /// Exponent of the time kernel s^(kappa-1); kappa = (alpha-1)2H + 2H = 2*alpha*H.
    [[nodiscard]] double kappa() const noexcept { return 2.0 * alpha * hurst; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

enum class OptionKind { Call, Put };

struct Contract {
    double strike = 1.0;
    double maturity = 1.0;
    double valuation_time = 0.0;
    OptionKind kind = OptionKind::Call;
};

struct MarketState {
    double short_rate = 0.0;  // may be negative
    double stock = 1.0;
};

enum class ModelVariant { Merton, SubMerton, FracMerton, SubFracMerton };

inline constexpr ModelVariant kAllVariants[] = {ModelVariant::Merton, ModelVariant::SubMerton,
                                                ModelVariant::FracMerton,
                                                ModelVariant::SubFracMerton};

[[nodiscard]] inline std::string_view to_string(ModelVariant v) noexcept {
    switch (v) {
        case ModelVariant::Merton: return "Merton";
        case ModelVariant::SubMerton: return "SubMerton";
        case ModelVariant::FracMerton: return "FracMerton";
        case ModelVariant::SubFracMerton: return "SubFracMerton";
    }
    return "?";
}

/// Column label used in the comparison table (P_M, P_SM, P_FM, P_SFM).
[[nodiscard]] inline std::string_view table_label(ModelVariant v) noexcept {
    switch (v) {
        case ModelVariant::Merton: return "P_M";
        case ModelVariant::SubMerton: return "P_SM";
        case ModelVariant::FracMerton: return "P_FM";
        case ModelVariant::SubFracMerton: return "P_SFM";
    }
    return "?";
}

[[nodiscard]] inline std::string_view to_string(OptionKind k) noexcept {
    return k == OptionKind::Call ? "call" : "put";
}

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

inline void check_common(const ModelParams& p) {
    require_finite(p.alpha, "alpha");
    require_finite(p.hurst, "hurst");
    require_finite(p.mu_r, "mu_r");
    require_finite(p.sigma_r, "sigma_r");
    require_finite(p.mu_s, "mu_s");
    require_finite(p.sigma_s, "sigma_s");
    require_finite(p.rho, "rho");
    if (!(p.hurst >= 0.5 && p.hurst < 1.0)) throw DomainError("hurst must lie in [1/2, 1)");
    if (p.sigma_r < 0.0) throw DomainError("sigma_r must be >= 0");
    if (p.sigma_s < 0.0) throw DomainError("sigma_s must be >= 0");
    if (!(p.rho >= -1.0 && p.rho <= 1.0)) throw DomainError("rho must lie in [-1, 1]");
}

}  // namespace detail

/// Returns `p` unchanged when it is admissible for the pricing formulas:
/// alpha in (1/2, 1], hurst in [1/2, 1), 2*alpha - alpha*hurst > 1,
/// non-negative volatilities and rho in [-1, 1]. Throws DomainError otherwise.
inline const ModelParams& validate(const ModelParams& p) {
    detail::check_common(p);
    if (!(p.alpha > 0.5 && p.alpha <= 1.0)) throw DomainError("alpha must lie in (1/2, 1]");
    if (!(2.0 * p.alpha - p.alpha * p.hurst > 1.0)) throw DomainError("2α−αH ≤ 1");
    return p;
}

/// Wider check used by path simulation, where only alpha in (0, 1] is needed.
inline const ModelParams& validate_for_simulation(const ModelParams& p) {
    detail::check_common(p);
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
    return p;
}

/// Pure function of (alpha, hurst). Call on validated parameters.
[[nodiscard]] inline ModelVariant classify(const ModelParams& p) noexcept {
    const bool physical = p.alpha == 1.0;
    const bool brownian = p.hurst == 0.5;
    if (physical) return brownian ? ModelVariant::Merton : ModelVariant::FracMerton;
    return brownian ? ModelVariant::SubMerton : ModelVariant::SubFracMerton;
}

/// Parameters of `base` moved onto `v`: Merton/FracMerton force alpha = 1,
/// Merton/SubMerton force hurst = 1/2. Everything else is kept.
[[nodiscard]] inline ModelParams as_variant(ModelParams base, ModelVariant v) noexcept {
    if (v == ModelVariant::Merton || v == ModelVariant::FracMerton) base.alpha = 1.0;
    if (v == ModelVariant::Merton || v == ModelVariant::SubMerton) base.hurst = 0.5;
    return base;
}

inline void validate(const Contract& c) {
    detail::require_finite(c.strike, "strike");
    detail::require_finite(c.maturity, "maturity");
    detail::require_finite(c.valuation_time, "valuation time");
    if (!(c.strike > 0.0)) throw DomainError("strike must be > 0");
    if (!(c.valuation_time >= 0.0 && c.valuation_time <= c.maturity))
        throw DomainError("valuation time must satisfy 0 <= t <= maturity");
}

inline void validate(const MarketState& m) {
    detail::require_finite(m.short_rate, "short rate");
    detail::require_finite(m.stock, "stock");
    if (!(m.stock > 0.0)) throw DomainError("stock price must be > 0");
}

}  // namespace sfm
