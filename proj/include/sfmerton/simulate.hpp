#pragma once

// Sample paths of the subordinated model and the Monte Carlo oracle for the
// forward-price closed form.
//
// Randomness is organised in streams: every generator takes an RngStream and
// derives its engine from (seed, stream_id) only, so a path or Monte Carlo
// block reproduces bit-for-bit no matter how work is split across threads.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "errors.hpp"
#include "params.hpp"

namespace sfm {

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    [[nodiscard]] std::mt19937_64 engine() const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32)};
        return std::mt19937_64(seq);
    }

    /// Child stream `index` of this stream.
    [[nodiscard]] RngStream substream(std::uint64_t index) const noexcept {
        return {seed, mix(stream_id ^ mix(index + 0x9e3779b97f4a7c15ULL))};
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {  // splitmix64 finaliser
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

namespace detail {

inline double open_uniform(std::mt19937_64& eng) {
    for (;;) {
        const double u = std::generate_canonical<double, 53>(eng);
        if (u > 0.0) return u;
    }
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& th : pool) th.join();
}

inline void check_grid_from_zero(const std::vector<double>& grid, const char* what) {
    if (grid.empty() || grid.front() != 0.0) throw DomainError(std::string(what) + " must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]) || !std::isfinite(grid[i]))
            throw DomainError(std::string(what) + " must be strictly increasing");
}

inline double uniform_step(const std::vector<double>& grid, const char* what) {
    check_grid_from_zero(grid, what);
    if (grid.size() < 2) return 0.0;
    const double h = grid.back() / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * h)
            throw DomainError(std::string(what) + " must be uniform");
    return h;
}

}  // namespace detail

/// Uniform grid {0, h, ..., horizon} with `steps` intervals.
[[nodiscard]] inline std::vector<double> uniform_grid(double horizon, std::size_t steps) {
    if (!(horizon > 0.0) || steps == 0) throw DomainError("uniform_grid: need horizon > 0 and steps > 0");
    std::vector<double> g(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) g[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    return g;
}

// ---------------------------------------------------------------------------
// α-stable subordinator

/// Standard one-sided stable variate with E[exp(-u Z)] = exp(-u^α), 0 < α < 1
/// (Kanter's representation from a uniform angle and a unit exponential).
[[nodiscard]] inline double stable_variate(double alpha, std::mt19937_64& eng) {
    const double v = std::numbers::pi * detail::open_uniform(eng);
    const double e = -std::log(detail::open_uniform(eng));
    const double a = std::sin(alpha * v) / std::pow(std::sin(v), 1.0 / alpha);
    const double b = std::pow(std::sin((1.0 - alpha) * v) / e, (1.0 - alpha) / alpha);
    return a * b;
}

/// U_α on `tau_grid` (starting at 0): independent increments distributed as
/// Δτ^{1/α} Z with Z from `stable_variate`.
[[nodiscard]] inline std::vector<double> sample_stable_levels(double alpha, const std::vector<double>& tau_grid,
                                                              const RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("stable subordinator needs alpha in (0, 1)");
    detail::check_grid_from_zero(tau_grid, "tau grid");
    auto eng = rng.engine();
    std::vector<double> u(tau_grid.size(), 0.0);
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        u[i] = u[i - 1] + std::pow(tau_grid[i] - tau_grid[i - 1], 1.0 / alpha) * stable_variate(alpha, eng);
    return u;
}

struct InverseSubordinatorOptions {
    /// Operational-time lattice step; <= 0 selects a tenth of the smallest t-grid spacing.
    double step = 0.0;
    std::size_t max_steps = 20'000'000;
};

/// T_α sampled on a t grid, with the lattice data behind it.
struct InverseSubordinator {
    std::vector<double> T_alpha;
    /// Lattice index k with T_alpha[i] = k * step.
    std::vector<std::size_t> lattice_index;
    /// U_α(T_alpha[i]); exceeds t_grid[i] for t > 0.
    std::vector<double> level;
    double step = 0.0;
};

/// T_α(t) = inf{τ > 0 : U_α(τ) > t} on the lattice τ_k = k·step: the first
/// lattice level whose U_α exceeds t, and 0 at t = 0. For α = 1 the clock is
/// physical time and T_α(t) = t exactly. Throws ResolutionError when
/// `max_steps` lattice steps do not carry U_α past the last grid time.
[[nodiscard]] inline InverseSubordinator inverse_subordinator(double alpha, const std::vector<double>& t_grid,
                                                              const RngStream& rng,
                                                              InverseSubordinatorOptions opt = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("inverse subordinator needs alpha in (0, 1]");
    detail::check_grid_from_zero(t_grid, "t grid");
    InverseSubordinator out;
    const std::size_t n = t_grid.size();
    if (opt.step <= 0.0) {
        double h = t_grid.size() > 1 ? t_grid[1] - t_grid[0] : 1.0;
        for (std::size_t i = 1; i < n; ++i) h = std::min(h, t_grid[i] - t_grid[i - 1]);
        opt.step = 0.1 * h;
    }
    out.step = opt.step;
    out.T_alpha.assign(n, 0.0);
    out.lattice_index.assign(n, 0);
    out.level.assign(n, 0.0);

    if (alpha == 1.0) {
        out.T_alpha = t_grid;
        out.level = t_grid;
        for (std::size_t i = 0; i < n; ++i)
            out.lattice_index[i] = static_cast<std::size_t>(std::llround(t_grid[i] / opt.step));
        return out;
    }

    auto eng = rng.engine();
    const double jump_scale = std::pow(opt.step, 1.0 / alpha);
    std::size_t k = 0;
    double u = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        while (u <= t_grid[i]) {
            if (k == opt.max_steps)
                throw ResolutionError("inverse subordinator: lattice of " + std::to_string(opt.max_steps) +
                                      " steps does not cover t = " + std::to_string(t_grid[i]));
            u += jump_scale * stable_variate(alpha, eng);
            ++k;
        }
        out.lattice_index[i] = k;
        out.T_alpha[i] = static_cast<double>(k) * opt.step;
        out.level[i] = u;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fractional Brownian motion

enum class FbmMethod { Auto, Circulant, Cholesky };

/// Eigenvalues of the circulant embedding (size 2m) of unit-step fractional
/// Gaussian noise autocovariance γ(k) = ½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H}).
[[nodiscard]] inline std::vector<double> circulant_eigenvalues(double hurst, std::size_t m) {
    const std::size_t M = 2 * m;
    auto gam = [hurst](double k) {
        const double h2 = 2.0 * hurst;
        return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) +
                      std::pow(std::abs(k - 1.0), h2));
    };
    std::vector<std::complex<double>> row(M), spec;
    for (std::size_t j = 0; j <= m; ++j) row[j] = gam(static_cast<double>(j));
    for (std::size_t j = m + 1; j < M; ++j) row[j] = gam(static_cast<double>(M - j));
    Eigen::FFT<double> fft;
    fft.fwd(spec, row);
    std::vector<double> lam(M);
    for (std::size_t j = 0; j < M; ++j) lam[j] = spec[j].real();
    return lam;
}

/// Lower Cholesky factor of Cov[B^H(τ_i), B^H(τ_j)] = ½(τ_i^{2H} + τ_j^{2H} − |τ_i − τ_j|^{2H})
/// over the nonzero grid points. Throws FactorizationError if not positive definite.
[[nodiscard]] inline Eigen::MatrixXd fbm_cholesky_factor(double hurst, const std::vector<double>& tau_grid) {
    detail::check_grid_from_zero(tau_grid, "tau grid");
    const auto n = static_cast<Eigen::Index>(tau_grid.size() - 1);
    Eigen::MatrixXd cov(n, n);
    const double h2 = 2.0 * hurst;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double s = tau_grid[i + 1], t = tau_grid[j + 1];
            cov(i, j) = 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
        }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw FactorizationError("fbm covariance is not positive definite");
    return llt.matrixL();
}

namespace detail {

// Two independent FBM paths on a uniform grid via circulant embedding: the real
// and imaginary parts of one FFT are independent with the target covariance.
// Returns false (leaving outputs untouched) when the embedding has a
// significantly negative eigenvalue.
inline bool fbm_circulant_pair(double hurst, const std::vector<double>& tau_grid, std::mt19937_64& eng,
                               std::vector<double>& b1, std::vector<double>& b2) {
    const std::size_t n = tau_grid.size() - 1;
    std::size_t m = 1;
    while (m < n) m <<= 1;
    auto lam = circulant_eigenvalues(hurst, m);
    const double top = *std::max_element(lam.begin(), lam.end());
    for (double& l : lam) {
        if (l < -1e-10 * top) return false;
        l = std::max(l, 0.0);
    }
    const std::size_t M = 2 * m;
    std::normal_distribution<double> normal;
    std::vector<std::complex<double>> w(M), y;
    for (std::size_t k = 0; k < M; ++k) {
        const double re = normal(eng);
        const double im = normal(eng);
        w[k] = std::sqrt(lam[k] / static_cast<double>(M)) * std::complex<double>(re, im);
    }
    Eigen::FFT<double> fft;
    fft.fwd(y, w);
    const double scale = std::pow(tau_grid.back() / static_cast<double>(n), hurst);
    b1.assign(n + 1, 0.0);
    b2.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        b1[i + 1] = b1[i] + scale * y[i].real();
        b2[i + 1] = b2[i] + scale * y[i].imag();
    }
    return true;
}

inline void fbm_cholesky_pair(double hurst, const std::vector<double>& tau_grid, std::mt19937_64& eng,
                              std::vector<double>& b1, std::vector<double>& b2) {
    const Eigen::MatrixXd L = fbm_cholesky_factor(hurst, tau_grid);
    const auto n = L.rows();
    std::normal_distribution<double> normal;
    Eigen::VectorXd z1(n), z2(n);
    for (Eigen::Index i = 0; i < n; ++i) z1[i] = normal(eng);
    for (Eigen::Index i = 0; i < n; ++i) z2[i] = normal(eng);
    const Eigen::VectorXd x1 = L * z1, x2 = L * z2;
    b1.assign(static_cast<std::size_t>(n) + 1, 0.0);
    b2.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        b1[static_cast<std::size_t>(i) + 1] = x1[i];
        b2[static_cast<std::size_t>(i) + 1] = x2[i];
    }
}

inline std::pair<std::vector<double>, std::vector<double>> independent_fbm_pair(
    double hurst, const std::vector<double>& tau_grid, const RngStream& rng, FbmMethod method) {
    if (!(hurst >= 0.5 && hurst < 1.0)) throw DomainError("fbm: hurst must lie in [1/2, 1)");
    std::vector<double> b1, b2;
    if (tau_grid.size() < 2) {
        detail::check_grid_from_zero(tau_grid, "tau grid");
        return {{0.0}, {0.0}};
    }
    auto eng = rng.engine();
    switch (method) {
        case FbmMethod::Cholesky:
            check_grid_from_zero(tau_grid, "tau grid");
            fbm_cholesky_pair(hurst, tau_grid, eng, b1, b2);
            break;
        case FbmMethod::Circulant:
            uniform_step(tau_grid, "tau grid");
            if (!fbm_circulant_pair(hurst, tau_grid, eng, b1, b2))
                throw FactorizationError("circulant embedding has negative eigenvalues");
            break;
        case FbmMethod::Auto:
            uniform_step(tau_grid, "tau grid");
            if (!fbm_circulant_pair(hurst, tau_grid, eng, b1, b2)) fbm_cholesky_pair(hurst, tau_grid, eng, b1, b2);
            break;
    }
    return {std::move(b1), std::move(b2)};
}

}  // namespace detail

/// FBM with Hurst index `hurst` on a uniform grid starting at 0; B(0) = 0.
/// Circulant embedding by default, with direct Cholesky factorisation as the
/// fallback when the embedding is not nonnegative (or when requested).
[[nodiscard]] inline std::vector<double> fbm_path(double hurst, const std::vector<double>& tau_grid,
                                                  const RngStream& rng, FbmMethod method = FbmMethod::Auto) {
    return detail::independent_fbm_pair(hurst, tau_grid, rng, method).first;
}

/// Two FBMs with correlation `rho`: B2 = ρ B1 + √(1−ρ²) B⊥, B⊥ independent of B1.
[[nodiscard]] inline std::pair<std::vector<double>, std::vector<double>> correlated_fbm_pair(
    double hurst, double rho, const std::vector<double>& tau_grid, const RngStream& rng,
    FbmMethod method = FbmMethod::Auto) {
    if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("rho must lie in [-1, 1]");
    auto [b1, bp] = detail::independent_fbm_pair(hurst, tau_grid, rng, method);
    const double c = std::sqrt(1.0 - rho * rho);
    std::vector<double> b2(b1.size());
    for (std::size_t i = 0; i < b1.size(); ++i) b2[i] = rho * b1[i] + c * bp[i];
    return {std::move(b1), std::move(b2)};
}

// ---------------------------------------------------------------------------
// Model paths

struct PathBundle {
    std::vector<double> t_grid;
    std::vector<double> T_alpha;
    std::vector<double> r_path;
    std::vector<double> S_path;
};

/// r(t) = r0 + μ_r T_α(t) + σ_r B1(T_α(t)) and
/// S(t) = s0 exp(μ_s T_α(t) − ½σ_s² T_α(t)^{2H} + σ_s B2(T_α(t))).
/// The t grid must be uniform and start at 0. Flat stretches of T_α give
/// exactly flat stretches of r and S.
[[nodiscard]] inline PathBundle model_paths(const ModelParams& params, double r0, double s0,
                                            const std::vector<double>& t_grid, const RngStream& rng,
                                            InverseSubordinatorOptions opt = {}) {
    validate_for_simulation(params);
    if (!(s0 > 0.0) || !std::isfinite(s0)) throw DomainError("s0 must be > 0");
    if (!std::isfinite(r0)) throw DomainError("r0 must be finite");
    detail::uniform_step(t_grid, "t grid");

    PathBundle out;
    out.t_grid = t_grid;
    const auto clock = inverse_subordinator(params.alpha, t_grid, rng.substream(0), opt);
    out.T_alpha = clock.T_alpha;

    // FBM on the operational lattice (or directly on t for the physical clock).
    std::vector<double> lattice;
    if (params.alpha == 1.0) {
        lattice = t_grid;
    } else {
        const std::size_t kmax = clock.lattice_index.back();
        lattice.resize(kmax + 1);
        for (std::size_t k = 0; k <= kmax; ++k) lattice[k] = static_cast<double>(k) * clock.step;
    }
    const auto [b1, b2] = correlated_fbm_pair(params.hurst, params.rho, lattice, rng.substream(1));

    const std::size_t n = t_grid.size();
    out.r_path.resize(n);
    out.S_path.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = params.alpha == 1.0 ? i : clock.lattice_index[i];
        const double T = out.T_alpha[i];
        out.r_path[i] = r0 + params.mu_r * T + params.sigma_r * b1[k];
        out.S_path[i] = s0 * std::exp(params.mu_s * T - 0.5 * params.sigma_s * params.sigma_s *
                                                             std::pow(T, 2.0 * params.hurst) +
                                      params.sigma_s * b2[k]);
    }
    return out;
}

/// `n_paths` independent bundles; path i uses stream {seed, i}, so results do
/// not depend on `workers`.
[[nodiscard]] inline std::vector<PathBundle> model_path_ensemble(const ModelParams& params, double r0,
                                                                 double s0, const std::vector<double>& t_grid,
                                                                 std::uint64_t seed, std::size_t n_paths,
                                                                 unsigned workers = 1,
                                                                 InverseSubordinatorOptions opt = {}) {
    std::vector<PathBundle> out(n_paths);
    detail::parallel_for(n_paths, workers, [&](std::size_t i) {
        out[i] = model_paths(params, r0, s0, t_grid, RngStream{seed, i}, opt);
    });
    return out;
}

/// Number of maximal runs of >= 2 equal consecutive values.
[[nodiscard]] inline std::size_t count_plateaus(const std::vector<double>& v) {
    std::size_t count = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1] && (i == 1 || v[i - 1] != v[i - 2])) ++count;
    return count;
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// E[(z_T − K)⁺] for z_T = z0 exp(−V/2 + √V Z): the forward-measure value of
/// the call, to compare with z0 Φ(d̂1) − K Φ(d̂2). Paths are drawn in fixed
/// blocks of 2^14, block b from rng.substream(b); blocks are summed in order.
[[nodiscard]] inline McEstimate mc_theta_price(double z0, double strike, double V, std::size_t n_paths,
                                               const RngStream& rng, unsigned workers = 1) {
    if (!(V >= 0.0) || !std::isfinite(V)) throw DomainError("mc_theta_price: V must be >= 0");
    if (!(z0 > 0.0) || !(strike >= 0.0)) throw DomainError("mc_theta_price: need z0 > 0, K >= 0");
    if (n_paths < 1000) throw DomainError("mc_theta_price: need at least 1000 paths");
    if (V == 0.0) return {std::max(z0 - strike, 0.0), 0.0};

    constexpr std::size_t kBlock = std::size_t{1} << 14;
    const std::size_t blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<double> sum(blocks, 0.0), sumsq(blocks, 0.0);
    const double sd = std::sqrt(V);
    detail::parallel_for(blocks, workers, [&](std::size_t b) {
        auto eng = rng.substream(b).engine();
        std::normal_distribution<double> normal;
        const std::size_t count = std::min(kBlock, n_paths - b * kBlock);
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double z = z0 * std::exp(-0.5 * V + sd * normal(eng));
            const double pay = std::max(z - strike, 0.0);
            s += pay;
            s2 += pay * pay;
        }
        sum[b] = s;
        sumsq[b] = s2;
    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        s += sum[b];
        s2 += sumsq[b];
    }
    const double n = static_cast<double>(n_paths);
    const double mean = s / n;
    const double var = std::max(s2 / n - mean * mean, 0.0) * n / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

}  // namespace sfm
