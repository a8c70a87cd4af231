#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include <sfmerton/mathfn.hpp>

#include "support.hpp"

using namespace sfm;
using Catch::Approx;

namespace {

// Φ(x) from the Maclaurin series of erf, summed in long double.
long double phi_series(long double x) {
    const long double y = x / std::sqrt(2.0L);
    long double term = y, sum = y;
    for (int n = 1; n < 200; ++n) {
        term *= -y * y / n;
        sum += term / (2 * n + 1);
        if (std::fabs(term) < 1e-30L) break;
    }
    return 0.5L + sum / std::sqrt(std::numbers::pi_v<long double>);
}

// Γ(x) = ∫_0^∞ t^{x-1} e^{-t} dt, split at 1 with the power substitution on [0, 1].
double gamma_by_quadrature(double x) {
    auto f = [x](double t) { return std::pow(t, x - 1.0) * std::exp(-t); };
    const double head = adaptive_quad(f, 0.0, 1.0, 1e-12, {Singularity::Lower, x});
    const double tail = adaptive_quad(f, 1.0, 60.0, 1e-12);
    return head + tail;
}

double poly_integrand(const PowerPolyIntegral& p, double s) {
    const double u = p.horizon - s;
    return (p.coeffs[0] + p.coeffs[1] * u + p.coeffs[2] * u * u) * std::pow(s, p.kappa - 1.0);
}

double quad_oracle(const PowerPolyIntegral& p, double tol = 1e-13) {
    QuadOptions opt;
    if (p.lower == 0.0) opt = {Singularity::Lower, p.kappa};
    return adaptive_quad([&](double s) { return poly_integrand(p, s); }, p.lower, p.upper, tol, opt);
}

}  // namespace

TEST_CASE("gamma at known points") {
    CHECK(sfm::gamma(1.0) == 1.0);
    CHECK(sfm::gamma(0.5) == Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
    // Frozen from the Euler integral (1.068628702119319354897...).
    CHECK(sfm::gamma(0.9) == Approx(1.0686287021193193).epsilon(1e-13));
    CHECK(gamma_by_quadrature(0.9) == Approx(sfm::gamma(0.9)).epsilon(1e-12));
    CHECK_THROWS_AS(sfm::gamma(0.0), DomainError);
    CHECK_THROWS_AS(sfm::gamma(-1.5), DomainError);
}

TEST_CASE("gamma matches its integral on (1/2, 2]") {
    for (double x : {0.55, 0.7, 0.9, 1.0, 1.3, 1.75, 2.0})
        CHECK(sfm::gamma(x) == Approx(gamma_by_quadrature(x)).epsilon(1e-12));
}

TEST_CASE("gamma recurrence x Γ(x) = Γ(x+1)") {
    testing::Gen gen(11);
    for (int i = 0; i < 200; ++i) {
        const double x = gen.uniform(0.5, 1.5);
        CHECK(x * sfm::gamma(x) == Approx(sfm::gamma(x + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("norm_cdf values and limits") {
    CHECK(norm_cdf(0.0) == 0.5);
    CHECK(norm_cdf(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(norm_cdf(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(norm_cdf(1.0) == Approx(0.8413447460685429).margin(1e-15));
    for (double x : {-3.0, -1.2, -0.1, 0.4, 1.0, 2.5})
        CHECK(std::abs(norm_cdf(x) - static_cast<double>(phi_series(x))) <= 1e-12);
    CHECK_THROWS_AS(norm_cdf(std::nan("")), DomainError);
}

TEST_CASE("norm_cdf symmetry and monotonicity") {
    testing::Gen gen(12);
    double prev = 0.0;
    for (int i = -400; i <= 400; ++i) {
        const double x = i * 0.02;
        const double v = norm_cdf(x);
        CHECK(v >= prev);
        prev = v;
    }
    for (int i = 0; i < 500; ++i) {
        const double x = gen.uniform(-8.0, 8.0);
        CHECK(std::abs(norm_cdf(x) + norm_cdf(-x) - 1.0) <= 1e-12);
    }
}

TEST_CASE("power_poly_integral elementary cases") {
    CHECK(power_poly_integral({1.0, 1.0, {1, 0, 0}, 0.0, 1.0}) == Approx(1.0).epsilon(1e-15));
    CHECK(power_poly_integral({2.0, 1.0, {0, 1, 0}, 0.0, 1.0}) == Approx(1.0 / 6.0).epsilon(1e-15));
    // Beta(κ, 2) = 1/(κ(κ+1)) for κ = 1.08.
    const PowerPolyIntegral beta{1.08, 1.0, {0, 1, 0}, 0.0, 1.0};
    CHECK(power_poly_integral(beta) == Approx(0.44515669515669516).epsilon(1e-14));
    CHECK(quad_oracle(beta) == Approx(power_poly_integral(beta)).epsilon(1e-10));
    CHECK(power_poly_integral({0.7, 2.0, {1, 2, 3}, 1.3, 1.3}) == 0.0);
}

TEST_CASE("power_poly_integral handles the s = 0 singularity for kappa < 1") {
    // ∫_0^1 s^{-0.3} ds = 1/0.7
    CHECK(power_poly_integral({0.7, 1.0, {1, 0, 0}, 0.0, 1.0}) == Approx(1.0 / 0.7).epsilon(1e-15));
}

TEST_CASE("power_poly_integral rejects bad bounds") {
    CHECK_THROWS_AS(power_poly_integral({1.0, 1.0, {1, 0, 0}, 0.5, 0.4}), DomainError);
    CHECK_THROWS_AS(power_poly_integral({1.0, 1.0, {1, 0, 0}, 0.0, 1.5}), DomainError);
    CHECK_THROWS_AS(power_poly_integral({1.0, 1.0, {1, 0, 0}, -0.1, 0.5}), DomainError);
    CHECK_THROWS_AS(power_poly_integral({0.0, 1.0, {1, 0, 0}, 0.0, 0.5}), DomainError);
}

TEST_CASE("power_poly_integral agrees with quadrature on a random sweep") {
    testing::Gen gen(13);
    for (int i = 0; i < 400; ++i) {
        PowerPolyIntegral p;
        p.kappa = gen.uniform(0.5, 2.0);
        p.horizon = gen.uniform(0.1, 5.0);
        p.coeffs = {gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)};
        const double x = gen.uniform(0.0, p.horizon), y = gen.uniform(0.0, p.horizon);
        p.lower = gen.chance(0.3) ? 0.0 : std::min(x, y);
        p.upper = gen.chance(0.3) ? p.horizon : std::max(x, y);
        const double v = power_poly_integral(p);
        INFO("kappa=" << p.kappa << " T=" << p.horizon << " [" << p.lower << "," << p.upper << "]");
        CHECK(std::abs(v - quad_oracle(p)) <= 1e-8 * (1.0 + std::abs(v)));
    }
}

TEST_CASE("power_poly_integral keeps relative accuracy on short intervals near the horizon") {
    // (T-s)^2 s^{κ-1} over [T-h, T]: tiny value, heavy cancellation for naive antiderivatives.
    for (double h : {1e-2, 1e-4, 1e-6}) {
        const PowerPolyIntegral p{0.8, 1.5, {0, 0, 1}, 1.5 - h, 1.5};
        const double v = power_poly_integral(p);
        const double ref = quad_oracle(p, 1e-15 * h * h * h);
        CHECK(v == Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("power_poly_integral is continuous across its two evaluation routes") {
    const double T = 2.0;
    for (double kappa : {0.6, 1.0, 1.08, 1.7}) {
        const double b = 1.6;
        const double below = power_poly_integral({kappa, T, {0.3, -0.4, 0.9}, 0.5 * b * (1 - 1e-12), b});
        const double above = power_poly_integral({kappa, T, {0.3, -0.4, 0.9}, 0.5 * b * (1 + 1e-12), b});
        CHECK(below == Approx(above).epsilon(1e-11));
    }
}

TEST_CASE("mirrored kernel form matches its direct integrand") {
    const double kappa = 0.75, T = 1.3;
    const std::array<double, 3> d{0.2, -0.5, 0.7};
    const double v = mirrored_kernel_integral(kappa, T, d, 0.0, T);
    const double ref = adaptive_quad(
        [&](double s) { return std::pow(T - s, kappa - 1.0) * (d[0] + d[1] * s + d[2] * s * s); }, 0.0, T,
        1e-13, {Singularity::Upper, kappa});
    CHECK(v == Approx(ref).epsilon(1e-10));
    const double part = mirrored_kernel_integral(kappa, T, d, 0.2, 0.9);
    const double ref_part = adaptive_quad(
        [&](double s) { return std::pow(T - s, kappa - 1.0) * (d[0] + d[1] * s + d[2] * s * s); }, 0.2, 0.9,
        1e-13);
    CHECK(part == Approx(ref_part).epsilon(1e-10));
}

TEST_CASE("adaptive_quad basics") {
    CHECK(adaptive_quad([](double s) { return s * s; }, 0.0, 1.0, 1e-10) == Approx(1.0 / 3.0).margin(1e-10));
    CHECK(adaptive_quad([](double s) { return std::pow(s, -0.2); }, 0.0, 1.0, 1e-8, {Singularity::Lower, 0.8}) ==
          Approx(1.25).margin(1e-8));
    CHECK(adaptive_quad([](double s) { return std::pow(1.0 - s, -0.5); }, 0.0, 1.0, 1e-10,
                        {Singularity::Upper, 0.5}) == Approx(2.0).margin(1e-10));
}

TEST_CASE("adaptive_quad reports an exhausted refinement budget") {
    auto wild = [](double s) { return std::sin(1.0 / (s + 1e-6)); };
    QuadOptions opt;
    opt.max_depth = 3;
    CHECK_THROWS_AS(adaptive_quad(wild, 0.0, 1.0, 1e-12, opt), ConvergenceError);
    CHECK_THROWS_AS(adaptive_quad(wild, 1.0, 0.0, 1e-6), DomainError);
}
