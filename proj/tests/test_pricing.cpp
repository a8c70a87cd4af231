#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include <sfmerton/coefficients.hpp>
#include <sfmerton/pricing.hpp>

#include "support.hpp"

using namespace sfm;
using Catch::Approx;

namespace {

ModelParams caption() {
    ModelParams p;
    p.alpha = 0.9;
    p.hurst = 0.6;
    p.mu_r = 0.5;
    p.sigma_r = 0.3;
    p.sigma_s = 0.4;
    p.rho = 0.4;
    return p;
}

ModelParams merton_example() {
    ModelParams p;
    p.mu_r = 0.5;
    p.sigma_r = 0.3;
    p.sigma_s = 0.4;
    p.rho = 0.4;
    return p;
}

double black_scholes_call(double S, double K, double T, double r, double sigma) {
    const double sd = sigma * std::sqrt(T);
    const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * T) / sd;
    return S * 0.5 * std::erfc(-d1 / std::sqrt(2.0)) -
           K * std::exp(-r * T) * 0.5 * std::erfc(-(d1 - sd) / std::sqrt(2.0));
}

struct Draw {
    ModelParams p;
    MarketState m;
    Contract c;
};

Draw draw(testing::Gen& gen) {
    Draw d;
    d.p = gen.params();
    d.m = {gen.uniform(-0.05, 0.3), gen.uniform(0.5, 5.0)};
    d.c.strike = gen.uniform(0.5, 5.0);
    d.c.maturity = gen.uniform(0.05, 3.0);
    d.c.valuation_time = gen.chance(0.3) ? 0.0 : gen.uniform(0.0, 0.95 * d.c.maturity);
    return d;
}

}  // namespace

TEST_CASE("total_variance special values") {
    CHECK(total_variance(caption(), 1.0, 1.0).total_variance == 0.0);

    ModelParams bs;
    bs.sigma_s = 0.25;
    CHECK(total_variance(bs, 0.2, 1.2).total_variance == Approx(0.0625).epsilon(1e-14));

    const auto m = merton_example();
    const double tau = 0.8;
    const double phi = 0.16 * tau + 0.4 * 0.3 * 0.4 * tau * tau + 0.09 * tau * tau * tau / 3.0;
    CHECK(total_variance(m, 0.4, 1.2).total_variance == Approx(phi).epsilon(1e-13));
}

TEST_CASE("sigma_hat_sq is the quadratic in time to maturity") {
    const auto v = total_variance(caption(), 0.0, 1.0);
    CHECK(v.sigma_hat_sq(1.0) == Approx(0.16));
    CHECK(v.sigma_hat_sq(0.5) == Approx(0.16 + 2 * 0.4 * 0.3 * 0.4 * 0.5 + 0.09 * 0.25));
    CHECK(v.kappa == Approx(1.08));
}

TEST_CASE("total variance is nonnegative, including perfectly anti-correlated draws") {
    testing::Gen gen(31);
    for (int i = 0; i < 500; ++i) {
        auto p = gen.params();
        if (gen.chance(0.5)) p.rho = -1.0;
        const double T = gen.uniform(0.01, 4.0);
        CHECK(total_variance(p, gen.uniform(0.0, T), T).total_variance >= 0.0);
    }
}

TEST_CASE("Merton example call") {
    const auto q = price(merton_example(), {0.3, 2.0}, {3.0, 0.3, 0.0, OptionKind::Call});
    CHECK(q.bond.price == Approx(0.89395932733014168).epsilon(1e-14));
    CHECK(q.variance.total_variance == Approx(0.05313).epsilon(1e-12));
    // Frozen from an independent high-precision evaluation of the closed form.
    CHECK(q.price == Approx(0.025629215220634317).epsilon(1e-11));
    CHECK(q.d2 == Approx(q.d1 - std::sqrt(q.variance.total_variance)).epsilon(1e-15));
    CHECK_FALSE(q.intrinsic);
}

TEST_CASE("classical Black-Scholes limit") {
    ModelParams p;
    p.sigma_s = 0.2;
    const auto q = price(p, {0.05, 100.0}, {100.0, 1.0, 0.0, OptionKind::Call});
    CHECK(q.price == Approx(10.450583572185567).epsilon(1e-12));
    CHECK(q.price == Approx(black_scholes_call(100, 100, 1, 0.05, 0.2)).epsilon(1e-13));
}

TEST_CASE("degenerate contracts return the intrinsic value") {
    const auto at_expiry = price(caption(), {0.3, 4.0}, {3.0, 1.0, 1.0, OptionKind::Call});
    CHECK(at_expiry.price == 1.0);
    CHECK(at_expiry.intrinsic);
    CHECK(price(caption(), {0.3, 2.0}, {3.0, 1.0, 1.0, OptionKind::Put}).price == 1.0);
    CHECK(price(caption(), {0.3, 2.0}, {3.0, 1.0, 1.0, OptionKind::Call}).price == 0.0);

    ModelParams still;  // no volatility at all
    still.sigma_s = 0.0;
    const auto q = price(still, {0.1, 3.0}, {2.0, 1.0, 0.0, OptionKind::Call});
    CHECK(q.intrinsic);
    CHECK(q.price == Approx(3.0 - 2.0 * std::exp(-0.1)).epsilon(1e-15));
}

TEST_CASE("tiny strike call tends to the spot") {
    const auto q = price(caption(), {0.3, 2.5}, {1e-12, 1.0, 0.0, OptionKind::Call});
    CHECK(q.price == Approx(2.5).epsilon(1e-11));
}

TEST_CASE("put-call parity on random draws") {
    testing::Gen gen(32);
    for (int i = 0; i < 1000; ++i) {
        auto d = draw(gen);
        d.c.kind = OptionKind::Call;
        const auto call = price(d.p, d.m, d.c);
        d.c.kind = OptionKind::Put;
        const auto put = price(d.p, d.m, d.c);
        const double gap = call.price - put.price - (d.m.stock - d.c.strike * call.bond.price);
        CHECK(std::abs(gap) <= 1e-12 * (1.0 + d.m.stock + d.c.strike));
    }
}

TEST_CASE("no-arbitrage bounds on random draws") {
    testing::Gen gen(33);
    for (int i = 0; i < 1000; ++i) {
        auto d = draw(gen);
        d.c.kind = OptionKind::Call;
        const auto call = price(d.p, d.m, d.c);
        d.c.kind = OptionKind::Put;
        const auto put = price(d.p, d.m, d.c);
        const double S = d.m.stock, KP = d.c.strike * call.bond.price;
        const double slack = 1e-13 * (S + KP);
        CHECK(call.price >= std::max(S - KP, 0.0) - slack);
        CHECK(call.price <= S + slack);
        CHECK(put.price >= std::max(KP - S, 0.0) - slack);
        CHECK(put.price <= KP + slack);
    }
}

TEST_CASE("call is monotone in spot and strike") {
    testing::Gen gen(34);
    for (int i = 0; i < 50; ++i) {
        const auto p = gen.params();
        const double T = gen.uniform(0.1, 2.0), r = gen.uniform(0.0, 0.3);
        double prev = -1.0;
        for (int j = 0; j <= 40; ++j) {
            const double c = price(p, {r, 0.5 + 0.1 * j}, {3.0, T, 0.0, OptionKind::Call}).price;
            CHECK(c >= prev - 1e-9);
            prev = c;
        }
        prev = 1e300;
        for (int j = 0; j <= 40; ++j) {
            const double c = price(p, {r, 3.0}, {0.5 + 0.1 * j, T, 0.0, OptionKind::Call}).price;
            CHECK(c <= prev + 1e-9);
            prev = c;
        }
    }
}

TEST_CASE("forward variance rate integrates to the total variance") {
    testing::Gen gen(35);
    for (int i = 0; i < 200; ++i) {
        const auto p = gen.params();
        const double T = gen.uniform(0.05, 3.0);
        const double t = gen.chance(0.3) ? 0.0 : gen.uniform(0.0, T);
        const double V = total_variance(p, t, T).total_variance;

        // σ̄²(s) = H s^{κ-1} σ̂²(s)/Γ^{2H} pointwise.
        const double s = 0.5 * (t + T);
        const double expect = p.hurst * std::pow(s, p.kappa() - 1.0) *
                              total_variance(p, t, T).sigma_hat_sq(s) /
                              std::pow(std::tgamma(p.alpha), 2.0 * p.hurst);
        CHECK(forward_variance_rate(p, s, T) == Approx(expect).epsilon(1e-13));

        QuadOptions opt;
        if (t == 0.0) opt = {Singularity::Lower, p.kappa()};
        const double integral =
            2.0 * adaptive_quad([&](double u) { return forward_variance_rate(p, u, T); }, t, T, 1e-13, opt);
        INFO("alpha=" << p.alpha << " H=" << p.hurst << " t=" << t << " T=" << T);
        CHECK(std::abs(integral - V) <= 1e-10 * (1.0 + V));
    }
}

TEST_CASE("reduced closed forms agree with the general price") {
    testing::Gen gen(36);
    for (int i = 0; i < 500; ++i) {
        auto d = draw(gen);
        if (gen.chance(0.25)) d.p.rho = 0.0;
        d.c.kind = gen.chance(0.5) ? OptionKind::Call : OptionKind::Put;
        const auto general = price(d.p, d.m, d.c);
        const auto special = price_special(d.p, d.m, d.c, classify(d.p));
        INFO("variant=" << to_string(classify(d.p)));
        CHECK(std::abs(special.price - general.price) <= 1e-10 * std::max(1.0, std::abs(general.price)));
        CHECK(special.variance.total_variance ==
              Approx(general.variance.total_variance).epsilon(1e-10).margin(1e-14));
    }
}

TEST_CASE("price_special rejects a mismatched variant") {
    CHECK_THROWS_AS(price_special(caption(), {0.3, 2.0}, {3.0, 1.0, 0.0, OptionKind::Call}, ModelVariant::Merton),
                    VariantMismatch);
}

TEST_CASE("origin form with no rate volatility") {
    auto p = caption();
    p.sigma_r = 0.0;
    p.mu_r = 0.0;
    const auto o = price_at_origin(p, {0.3, 2.0}, {3.0, 0.7, 0.0, OptionKind::Call});
    CHECK(o.sigma_bar_sq * 0.7 == Approx(o.general.variance.total_variance).epsilon(1e-13));
    CHECK(o.sigma_bar_sq_printed == Approx(o.sigma_bar_sq).epsilon(1e-15));
    CHECK(o.r_bar == 0.3);
}

TEST_CASE("origin form with the comparison-table parameters") {
    const auto o = price_at_origin(caption(), {0.3, 3.0}, {3.0, 1.0, 0.0, OptionKind::Call});
    CHECK(o.p0 == Approx(0.58729355488529863).epsilon(1e-12));
    CHECK(o.p0 == Approx(o.general.bond.price).epsilon(1e-13));
    CHECK(o.sigma_bar_sq * 1.0 == Approx(o.general.variance.total_variance).epsilon(1e-13));
    CHECK(std::abs(o.price - o.general.price) <= 1e-10);
    // The published σ̄² undercounts the cross and quadratic terms.
    CHECK(o.sigma_bar_sq_printed < o.sigma_bar_sq);
    CHECK(std::abs(o.price_printed - o.general.price) > 1e-4);
}

TEST_CASE("origin form reduces to the classical average rate") {
    const auto p = merton_example();
    const double T = 0.8, r0 = 0.3;
    const auto o = price_at_origin(p, {r0, 2.0}, {3.0, T, 0.0, OptionKind::Call});
    CHECK(o.r_bar == Approx(r0 + 0.5 * T / 2.0 - 0.09 * T * T / 6.0).epsilon(1e-14));
    CHECK(-o.r_bar * T == Approx(std::log(bond_price(p, r0, 0.0, T).price)).epsilon(1e-14));
}

TEST_CASE("origin form equals the general price on random draws") {
    testing::Gen gen(37);
    for (int i = 0; i < 300; ++i) {
        auto d = draw(gen);
        d.c.valuation_time = 0.0;
        const auto o = price_at_origin(d.p, d.m, d.c);
        CHECK(std::abs(o.price - o.general.price) <= 1e-10 * std::max(1.0, o.general.price));
    }
    CHECK_THROWS_AS(price_at_origin(caption(), {0.3, 3.0}, {3.0, 1.0, 0.5, OptionKind::Call}), DomainError);
}

TEST_CASE("price table layout") {
    std::vector<double> spots;
    for (int i = 0; i <= 8; ++i) spots.push_back(2.0 + 0.25 * i);
    const auto rows = price_table(caption(), spots, {0.2, 1.0}, 3.0, 0.3);
    REQUIRE(rows.size() == 72);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].spot == spots[i / 8]);
        CHECK(rows[i].maturity == (i / 4 % 2 == 0 ? 0.2 : 1.0));
        CHECK(rows[i].variant == kAllVariants[i % 4]);
    }
}

TEST_CASE("fractional variants price below their Hurst one-half counterparts") {
    std::vector<double> spots;
    for (int i = 0; i <= 8; ++i) spots.push_back(2.0 + 0.25 * i);
    const auto rows = price_table(caption(), spots, {0.2, 1.0}, 3.0, 0.3);
    for (std::size_t i = 0; i < rows.size(); i += 4) {
        INFO("S=" << rows[i].spot << " T=" << rows[i].maturity);
        CHECK(rows[i + 2].price <= rows[i].price);      // FM vs M
        CHECK(rows[i + 3].price <= rows[i + 1].price);  // SFM vs SM
    }
}

TEST_CASE("table agrees with Black-Scholes when the rate is deterministic") {
    ModelParams p;
    p.sigma_s = 0.3;
    const auto rows = price_table(p, {2.5}, {0.5}, 3.0, 0.04);
    const double bs = black_scholes_call(2.5, 3.0, 0.5, 0.04, 0.3);
    CHECK(rows[0].price == Approx(bs).epsilon(1e-12));  // Merton column
}
