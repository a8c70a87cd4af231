#pragma once

// Time-dependent diffusion coefficients of the subordinated dynamics.

#include <cmath>

#include "mathfn.hpp"
#include "params.hpp"

namespace sfm {

/// H t^{2H-1} (t^{α-1}/Γ(α))^{2H}; singular or degenerate at t = 0 unless α = 1, H = 1/2.
[[nodiscard]] inline double time_scale(const ModelParams& p, double t) {
    const double H = p.hurst;
    return H * std::pow(t, 2.0 * H - 1.0) *
           std::pow(std::pow(t, p.alpha - 1.0) / gamma(p.alpha), 2.0 * H);
}

/// σ̃_s(t) and σ̃_r(t): square roots of time_scale(t) σ².
struct LocalVolatility {
    double stock = 0.0;
    double rate = 0.0;
};

[[nodiscard]] inline LocalVolatility local_volatility(const ModelParams& p, double t) {
    const double a = time_scale(p, t);
    return {std::sqrt(a * p.sigma_s * p.sigma_s), std::sqrt(a * p.sigma_r * p.sigma_r)};
}

/// σ̄²(s) = σ̃_s² + 2ρ σ̃_r σ̃_s (T-s) + σ̃_r² (T-s)²: variance rate of the forward z = S/P.
[[nodiscard]] inline double forward_variance_rate(const ModelParams& p, double s, double maturity) {
    const auto lv = local_volatility(p, s);
    const double u = maturity - s;
    return lv.stock * lv.stock + 2.0 * p.rho * lv.rate * lv.stock * u + lv.rate * lv.rate * u * u;
}

}  // namespace sfm
