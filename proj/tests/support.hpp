#pragma once

// Hand-rolled generators for property tests.

#include <algorithm>
#include <cstdint>
#include <random>

#include <sfmerton/params.hpp>

namespace sfm::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    std::mt19937_64& engine() { return eng_; }

    /// Admissible parameters; about a quarter of draws land on each variant.
    ModelParams params() {
        ModelParams p;
        const int variant = std::uniform_int_distribution<int>(0, 3)(eng_);
        p.hurst = (variant == 0 || variant == 1) ? 0.5 : uniform(0.5, 0.95);
        const double alpha_min = std::max(0.5, 1.0 / (2.0 - p.hurst)) + 1e-3;
        p.alpha = (variant == 0 || variant == 2) ? 1.0 : uniform(alpha_min, 0.999);
        p.mu_r = uniform(-0.5, 0.5);
        p.sigma_r = uniform(0.0, 0.5);
        p.mu_s = uniform(-0.2, 0.2);
        p.sigma_s = uniform(0.05, 0.6);
        p.rho = uniform(-1.0, 1.0);
        return p;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace sfm::testing
