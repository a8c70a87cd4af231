#pragma once

// Output formats: CSV (17 significant digits, round-trip exact), JSON and the
// aligned text layout of the comparison table. Files are written to a
// temporary sibling and renamed into place, so readers never see a partial file.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "pde_verify.hpp"
#include "pricing.hpp"
#include "simulate.hpp"

namespace sfm {

/// Round-trip exact text for a double (%.17g).
[[nodiscard]] inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

[[nodiscard]] inline std::string fmt_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    return buf;
}

/// Writes `content` to `path` via a temporary file in the same directory.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    auto tmp = path;
    tmp += ".tmp" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw DomainError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DomainError("cannot move output into '" + path.string() + "': " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// Table

[[nodiscard]] inline std::string table_csv(const std::vector<TableRow>& rows) {
    std::string out = "S,T,variant,price\n";
    for (const auto& r : rows)
        out += fmt17(r.spot) + "," + fmt17(r.maturity) + "," + std::string(to_string(r.variant)) + "," +
               fmt17(r.price) + "\n";
    return out;
}

/// One line per spot, one column group per maturity with P_M, P_SM, P_FM,
/// P_SFM inside each group; prices to `decimals` places.
[[nodiscard]] inline std::string table_text(const std::vector<TableRow>& rows, int decimals = 4) {
    std::vector<double> spots, mats;
    std::map<std::pair<double, double>, std::array<double, 4>> cell;
    for (const auto& r : rows) {
        if (std::find(spots.begin(), spots.end(), r.spot) == spots.end()) spots.push_back(r.spot);
        if (std::find(mats.begin(), mats.end(), r.maturity) == mats.end()) mats.push_back(r.maturity);
        cell[{r.spot, r.maturity}][static_cast<std::size_t>(r.variant)] = r.price;
    }
    const int w = decimals + 6;
    auto pad = [](std::string s, int width) {
        if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), ' ');
        return s;
    };
    auto fmt_g = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", x);
        return std::string(buf);
    };

    std::ostringstream out;
    out << pad("", 6);
    for (double T : mats) {
        const std::string label = "T=" + fmt_g(T);
        const int group = 4 * w;
        const int left = (group - static_cast<int>(label.size())) / 2;
        out << "  " << std::string(static_cast<std::size_t>(left), ' ') << label
            << std::string(static_cast<std::size_t>(group - left - static_cast<int>(label.size())), ' ');
    }
    out << "\n" << pad("S", 6);
    for (std::size_t g = 0; g < mats.size(); ++g) {
        out << "  ";
        for (auto v : kAllVariants) out << pad(std::string(table_label(v)), w);
    }
    out << "\n";
    for (double S : spots) {
        out << pad(fmt_g(S), 6);
        for (double T : mats) {
            out << "  ";
            const auto it = cell.find({S, T});
            for (std::size_t k = 0; k < 4; ++k)
                out << pad(it == cell.end() ? std::string("-") : fmt_fixed(it->second[k], decimals), w);
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Quotes

[[nodiscard]] inline nlohmann::json bond_json(const BondQuote& b, ModelVariant v) {
    return {{"price", b.price}, {"f1", b.f1}, {"tau", b.tau}, {"variant", std::string(to_string(v))}};
}

[[nodiscard]] inline nlohmann::json quote_json(const OptionQuote& q, ModelVariant v) {
    nlohmann::json j{{"price", q.price},
                     {"d1", q.d1},
                     {"d2", q.d2},
                     {"bond_price", q.bond.price},
                     {"total_variance", q.variance.total_variance},
                     {"variant", std::string(to_string(v))},
                     {"kind", std::string(to_string(q.kind))}};
    if (q.intrinsic) j["intrinsic"] = true;
    // JSON has no infinities; an intrinsic quote reports its d's as null.
    if (!std::isfinite(q.d1)) j["d1"] = nullptr;
    if (!std::isfinite(q.d2)) j["d2"] = nullptr;
    return j;
}

[[nodiscard]] inline nlohmann::json origin_json(const OriginQuote& o) {
    return {{"p0", o.p0},
            {"r_bar", o.r_bar},
            {"sigma_bar_sq", o.sigma_bar_sq},
            {"sigma_bar_sq_printed", o.sigma_bar_sq_printed},
            {"price", o.price},
            {"price_printed", o.price_printed},
            {"note",
             "sigma_bar_sq_printed omits a factor 2 on the cross and quadratic terms; "
             "sigma_bar_sq equals V/T and reproduces the general price"}};
}

// nlohmann prints doubles in their shortest round-trip form.
[[nodiscard]] inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Residual reports

[[nodiscard]] inline nlohmann::json residual_json(const ResidualReport& r) {
    return {{"grid_h", r.grid_h}, {"max_residual", r.max_residual}, {"est_order", r.est_order}};
}

[[nodiscard]] inline std::string residual_csv(const ResidualReport& r) {
    std::string out = "h,max_residual\n";
    for (std::size_t i = 0; i < r.grid_h.size(); ++i) out += fmt17(r.grid_h[i]) + "," + fmt17(r.max_residual[i]) + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Paths

/// Long format: path_id,t,T_alpha,r,S.
[[nodiscard]] inline std::string paths_csv(const std::vector<PathBundle>& paths) {
    std::string out = "path_id,t,T_alpha,r,S\n";
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& b = paths[p];
        for (std::size_t i = 0; i < b.t_grid.size(); ++i)
            out += std::to_string(p) + "," + fmt17(b.t_grid[i]) + "," + fmt17(b.T_alpha[i]) + "," +
                   fmt17(b.r_path[i]) + "," + fmt17(b.S_path[i]) + "\n";
    }
    return out;
}

}  // namespace sfm
