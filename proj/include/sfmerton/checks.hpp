#pragma once

// The acceptance suites. Each returns one CheckResult; `run_all_checks` runs
// them in order. Used by `sfmerton check` and by the acceptance test binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bond.hpp"
#include "io.hpp"
#include "mathfn.hpp"
#include "params.hpp"
#include "pde_verify.hpp"
#include "pricing.hpp"
#include "simulate.hpp"

namespace sfm {

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    double time_limit = 0.0;  // seconds; 0 means none
    std::string detail;
};

struct CheckOptions {
    std::uint64_t seed = 20240601;
    unsigned workers = 1;
};

namespace checks {

// Parameters of the comparison table.
inline ModelParams table_params() { return {0.9, 0.6, 0.5, 0.3, 0.0, 0.4, 0.4}; }

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
}

// A valid parameter set; each variant about a quarter of the time.
inline ModelParams random_params(std::mt19937_64& eng) {
    ModelParams p;
    const int variant = std::uniform_int_distribution<int>(0, 3)(eng);
    p.hurst = variant < 2 ? 0.5 : uniform(eng, 0.5, 0.95);
    const double alpha_min = std::max(0.5, 1.0 / (2.0 - p.hurst)) + 1e-3;
    p.alpha = (variant == 0 || variant == 2) ? 1.0 : uniform(eng, alpha_min, 0.999);
    p.mu_r = uniform(eng, -0.5, 0.5);
    p.sigma_r = uniform(eng, 0.0, 0.5);
    p.mu_s = uniform(eng, -0.2, 0.2);
    p.sigma_s = uniform(eng, 0.05, 0.6);
    p.rho = uniform(eng, -1.0, 1.0);
    return p;
}

struct Scenario {
    ModelParams params;
    MarketState market;
    Contract contract;
};

inline Scenario random_scenario(std::mt19937_64& eng) {
    Scenario s;
    s.params = random_params(eng);
    s.market = {uniform(eng, -0.05, 0.3), uniform(eng, 0.5, 5.0)};
    s.contract.strike = uniform(eng, 0.5, 5.0);
    s.contract.maturity = uniform(eng, 0.05, 3.0);
    s.contract.valuation_time = uniform(eng, 0.0, 1.0) < 0.3 ? 0.0 : uniform(eng, 0.0, 0.95 * s.contract.maturity);
    return s;
}

inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

inline CheckResult timed(int id, std::string name, double limit, const std::function<bool(std::string&)>& body) {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.time_limit = limit;
    const auto start = std::chrono::steady_clock::now();
    try {
        r.passed = body(r.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit > 0.0 && r.seconds > limit) {
        r.passed = false;
        r.detail += " [over time limit]";
    }
    return r;
}

// Mean and standard error of the mean.
inline std::pair<double, double> mean_se(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double m = 0.0;
    for (double v : x) m += v;
    m /= n;
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return {m, std::sqrt(s / (n - 1.0) / n)};
}

}  // namespace checks

/// 1. call − put = S − K·P over 1000 random draws.
inline CheckResult check_parity(const CheckOptions& opt = {}) {
    return checks::timed(1, "put-call parity", 5.0, [&](std::string& detail) {
        std::mt19937_64 eng(opt.seed + 1);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            auto s = checks::random_scenario(eng);
            s.contract.kind = OptionKind::Call;
            const auto call = price(s.params, s.market, s.contract);
            s.contract.kind = OptionKind::Put;
            const auto put = price(s.params, s.market, s.contract);
            const double gap = call.price - put.price - (s.market.stock - s.contract.strike * call.bond.price);
            worst = std::max(worst, std::abs(gap) / (1.0 + s.market.stock + s.contract.strike));
        }
        detail = "max |gap|/(1+S+K) = " + checks::sci(worst) + " (limit 1e-12)";
        return worst <= 1e-12;
    });
}

/// 2. General formulas against the reduced closed forms of each variant.
inline CheckResult check_reductions(const CheckOptions& opt = {}) {
    return checks::timed(2, "reductions", 5.0, [&](std::string& detail) {
        std::mt19937_64 eng(opt.seed + 2);
        double worst_price = 0.0, worst_f1 = 0.0;
        int counts[4] = {0, 0, 0, 0};
        for (int i = 0; i < 2000; ++i) {
            auto s = checks::random_scenario(eng);
            if (i % 4 == 0) s.params.rho = 0.0;
            s.contract.kind = i % 2 ? OptionKind::Put : OptionKind::Call;
            const auto v = classify(s.params);
            ++counts[static_cast<int>(v)];
            const double general = price(s.params, s.market, s.contract).price;
            const double special = price_special(s.params, s.market, s.contract, v).price;
            // Relative, with prices under 1e-12·(S+K) compared on that scale.
            const double scale = std::max(std::abs(general), 1e-12 * (s.market.stock + s.contract.strike));
            worst_price = std::max(worst_price, std::abs(general - special) / scale);

            const double t = s.contract.valuation_time, T = s.contract.maturity;
            const double f1 = f1_general(s.params, t, T);
            worst_f1 = std::max(worst_f1, std::abs(f1_special(s.params, t, T, v) - f1) / (1.0 + std::abs(f1)));
        }
        std::ostringstream os;
        os << "price rel " << checks::sci(worst_price) << " (limit 1e-10), f1 " << checks::sci(worst_f1)
           << " (limit 1e-12); draws M/SM/FM/SFM " << counts[0] << "/" << counts[1] << "/" << counts[2] << "/"
           << counts[3];
        detail = os.str();
        return worst_price <= 1e-10 && worst_f1 <= 1e-12;
    });
}

/// 3. Closed-form f1 and total variance against adaptive quadrature.
inline CheckResult check_oracle(const CheckOptions& opt = {}) {
    return checks::timed(3, "quadrature oracle", 30.0, [&](std::string& detail) {
        std::mt19937_64 eng(opt.seed + 3);
        double worst_f1 = 0.0, worst_v = 0.0;
        for (int i = 0; i < 500; ++i) {
            const auto s = checks::random_scenario(eng);
            const auto& p = s.params;
            const double t = s.contract.valuation_time, T = s.contract.maturity;
            const double k = p.kappa();
            const double g = std::pow(gamma(p.alpha), 2.0 * p.hurst);
            const double sr2 = p.sigma_r * p.sigma_r;

            // f1 over s in [0, τ] with kernel (T − s)^{κ−1}.
            const double f1 = f1_general(p, t, T);
            QuadOptions upper;
            if (t == 0.0) upper = {Singularity::Upper, k};
            const double f1_quad =
                p.hurst / g *
                adaptive_quad([&](double u) { return std::pow(T - u, k - 1.0) * (sr2 * u * u - 2.0 * p.mu_r * u); },
                              0.0, T - t, 1e-13, upper);
            const double f1_scale =
                p.hurst / g *
                mirrored_kernel_integral(k, T, {0.0, 2.0 * std::abs(p.mu_r), sr2}, 0.0, T - t);
            worst_f1 = std::max(worst_f1, std::abs(f1 - f1_quad) / std::max(f1_scale, 1e-300));

            // V over s in [t, T] with kernel s^{κ−1}.
            const auto vd = total_variance(p, t, T);
            QuadOptions lower;
            if (t == 0.0) lower = {Singularity::Lower, k};
            const double v_quad =
                2.0 * p.hurst / g *
                adaptive_quad([&](double u) { return vd.sigma_hat_sq(u) * std::pow(u, k - 1.0); }, t, T, 1e-13, lower);
            const double v_scale =
                2.0 * p.hurst / g *
                power_poly_integral({k, T, {vd.coeffs[0], std::abs(vd.coeffs[1]), vd.coeffs[2]}, t, T});
            worst_v = std::max(worst_v, std::abs(vd.total_variance - v_quad) / std::max(v_scale, 1e-300));
        }
        detail = "f1 rel " + checks::sci(worst_f1) + ", V rel " + checks::sci(worst_v) + " (limit 1e-8)";
        return worst_f1 <= 1e-8 && worst_v <= 1e-8;
    });
}

/// 4. Finite-difference residuals of bond and call for every variant.
inline CheckResult check_pde(const CheckOptions& = {}) {
    return checks::timed(4, "PDE residuals", 120.0, [&](std::string& detail) {
        bool ok = true;
        std::ostringstream os;
        os << "orders";
        auto judge = [&](const ResidualReport& r) {
            bool good = r.est_order >= 1.7 && r.est_order <= 2.3;
            for (std::size_t i = 1; i < r.max_residual.size(); ++i)
                good = good && r.max_residual[i] < r.max_residual[i - 1];
            ok = ok && good;
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.3f", r.est_order);
            return std::string(buf);
        };
        for (auto v : kAllVariants) {
            const auto p = as_variant(checks::table_params(), v);
            const auto bond = bond_pde_residual(p, 1.0, PdeGrid{});
            const auto call = option_pde_residual(p, {3.0, 1.0, 0.0, OptionKind::Call}, PdeGrid{});
            os << " " << table_label(v) << " bond " << judge(bond) << " call " << judge(call) << ";";
        }
        detail = os.str();
        return ok;
    });
}

/// 5. Prices just before expiry and the bond at maturity.
inline CheckResult check_boundary(const CheckOptions& = {}) {
    return checks::timed(5, "boundary", 0.0, [&](std::string& detail) {
        const double K = 3.0, T = 1.0;
        double worst = 0.0;
        bool bonds = true;
        for (auto v : kAllVariants) {
            const auto p = as_variant(checks::table_params(), v);
            for (double ratio : {0.5, 0.9, 1.1, 2.0}) {
                const double S = ratio * K;
                const double c = price(p, {0.3, S}, {K, T, T - 1e-6, OptionKind::Call}).price;
                worst = std::max(worst, std::abs(c - std::max(S - K, 0.0)));
            }
            bonds = bonds && bond_price(p, 0.3, T, T).price == 1.0;
        }
        detail = "max |C - (S-K)+| at tau=1e-6: " + checks::sci(worst) + " (limit 1e-4); bond at maturity " +
                 (bonds ? "exactly 1" : "NOT 1");
        return worst <= 1e-4 && bonds;
    });
}

/// 6. Monte Carlo oracle, Laplace transform of the subordinator, FBM moments.
inline CheckResult check_monte_carlo(const CheckOptions& opt = {}) {
    return checks::timed(6, "Monte Carlo", 180.0, [&](std::string& detail) {
        std::ostringstream os;
        // Ten (z0/K, V) points, the first one being the classical worked example.
        std::mt19937_64 eng(opt.seed + 6);
        int inside = 0;
        for (int i = 0; i < 10; ++i) {
            const double K = i == 0 ? 3.0 : 1.0;
            const double z0 = i == 0 ? 2.0 / 0.89395932733014168 : checks::uniform(eng, 0.5, 2.0);
            const double V = i == 0 ? 0.05313 : checks::uniform(eng, 0.01, 0.5);
            const auto mc =
                mc_theta_price(z0, K, V, 1'000'000, RngStream{opt.seed, 600 + static_cast<std::uint64_t>(i)},
                               opt.workers);
            const double sd = std::sqrt(V);
            const double d1 = (std::log(z0 / K) + 0.5 * V) / sd;
            const double exact = z0 * norm_cdf(d1) - K * norm_cdf(d1 - sd);
            if (std::abs(mc.estimate - exact) <= 3.0 * mc.standard_error) ++inside;
        }
        os << "theta " << inside << "/10 within 3SE;";
        bool ok = inside >= 9;

        // E[exp(-U(1))] = e^{-1}.
        for (double alpha : {0.6, 0.7, 0.8, 0.95}) {
            auto e = RngStream{opt.seed, 700 + static_cast<std::uint64_t>(alpha * 100)}.engine();
            std::vector<double> x(100000);
            for (auto& v : x) v = std::exp(-stable_variate(alpha, e));
            const auto [m, se] = checks::mean_se(x);
            const double z = std::abs(m - std::exp(-1.0)) / se;
            ok = ok && z <= 3.0;
            char buf[48];
            std::snprintf(buf, sizeof buf, " laplace(%.2f) %.2fSE", alpha, z);
            os << buf;
        }

        // Var B(1) = 1 and Cov(B(0.5), B(1)) = 0.5 at H = 0.8.
        const auto grid = uniform_grid(1.0, 64);
        std::vector<double> var(100000), cov(100000);
        for (std::size_t i = 0; i < var.size(); ++i) {
            const auto b = fbm_path(0.8, grid, RngStream{opt.seed + 800, i});
            var[i] = b[64] * b[64];
            cov[i] = b[32] * b[64];
        }
        const auto [vm, vse] = checks::mean_se(var);
        const auto [cm, cse] = checks::mean_se(cov);
        const double zv = std::abs(vm - 1.0) / vse, zc = std::abs(cm - 0.5) / cse;
        ok = ok && zv <= 3.0 && zc <= 3.0;
        char buf[64];
        std::snprintf(buf, sizeof buf, "; fbm var %.2fSE cov %.2fSE", zv, zc);
        os << buf;
        detail = os.str();
        return ok;
    });
}

inline std::vector<double> table_spots() {
    std::vector<double> s;
    for (int i = 0; i <= 8; ++i) s.push_back(2.0 + 0.25 * i);
    return s;
}

/// 7. Ordering claim and layout of the comparison table.
inline CheckResult check_table(const CheckOptions& = {}) {
    return checks::timed(7, "comparison table", 0.0, [&](std::string& detail) {
        const auto rows = price_table(checks::table_params(), table_spots(), {0.2, 1.0}, 3.0, 0.3);
        bool layout = rows.size() == 72;
        int violations = 0;
        for (std::size_t i = 0; layout && i < rows.size(); ++i) {
            layout = rows[i].spot == table_spots()[i / 8] && rows[i].maturity == (i / 4 % 2 ? 1.0 : 0.2) &&
                     rows[i].variant == kAllVariants[i % 4];
            if (i % 4 == 0) {
                if (rows[i + 2].price > rows[i].price) ++violations;
                if (rows[i + 3].price > rows[i + 1].price) ++violations;
            }
        }
        // Text layout: group header, column header, nine spot rows of 1 + 8 fields.
        const auto text = table_text(rows);
        std::istringstream in(text);
        std::string line;
        std::vector<std::string> lines;
        while (std::getline(in, line)) lines.push_back(line);
        layout = layout && lines.size() == 11 && lines[0].find("T=0.2") != std::string::npos &&
                 lines[0].find("T=1") != std::string::npos;
        for (std::size_t i = 1; layout && i < lines.size(); ++i) {
            std::istringstream fields(lines[i]);
            std::vector<std::string> f;
            for (std::string w; fields >> w;) f.push_back(w);
            layout = f.size() == 9;
        }
        detail = std::to_string(violations) + " ordering violations over 36 pairs; layout " +
                 (layout ? "9 spots x 2 maturities x 4 variants" : "WRONG");
        return layout && violations == 0;
    });
}

/// 8. Plateaus of subordinated paths and the α → 1 limit of the clock.
inline CheckResult check_morphology(const CheckOptions& opt = {}) {
    return checks::timed(8, "path morphology", 0.0, [&](std::string& detail) {
        ModelParams p;
        p.alpha = 0.9;
        p.hurst = 0.8;
        p.sigma_r = 0.1;
        p.sigma_s = 0.1;
        const auto grid = uniform_grid(1.0, 1000);
        const auto paths = model_path_ensemble(p, 0.01, 1.0, grid, opt.seed, 100, opt.workers);
        double plateaus = 0.0;
        for (const auto& b : paths) plateaus += static_cast<double>(count_plateaus(b.S_path));
        plateaus /= 100.0;  // per path on [0, 1], i.e. per unit time

        std::vector<double> sup;
        for (std::uint64_t i = 0; i < 100; ++i) {
            const auto c = inverse_subordinator(0.999, grid, RngStream{opt.seed + 900, i});
            double s = 0.0;
            for (std::size_t j = 0; j < grid.size(); ++j) s = std::max(s, std::abs(c.T_alpha[j] - grid[j]));
            sup.push_back(s);
        }
        std::sort(sup.begin(), sup.end());
        const double median = 0.5 * (sup[49] + sup[50]);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%.1f plateaus per unit time (need >= 1); alpha=0.999 median sup|T-t| %.4f (need < 0.01)",
                      plateaus, median);
        detail = buf;
        return plateaus >= 1.0 && median < 0.01;
    });
}

[[nodiscard]] inline std::vector<CheckResult> run_all_checks(const CheckOptions& opt = {}) {
    return {check_parity(opt),       check_reductions(opt), check_oracle(opt),     check_pde(opt),
            check_boundary(opt),     check_monte_carlo(opt), check_table(opt),     check_morphology(opt)};
}

[[nodiscard]] inline std::string format_check(const CheckResult& r) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%s] %d %-18s %7.2fs  ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds);
    return buf + r.detail;
}

}  // namespace sfm
