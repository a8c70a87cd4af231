#pragma once

// Flat key = value configuration shared by the command line and config files.
//
//     # comparison table
//     alpha = 0.9
//     hurst = 0.6
//
// Blank lines and text after '#' are ignored. Unknown keys are errors, so a
// typo never silently falls back to a default.

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "params.hpp"

namespace sfm {

/// Everything a run needs besides the subcommand and output options.
struct RunInputs {
    ModelParams params{0.9, 0.6, 0.5, 0.3, 0.0, 0.4, 0.4};
    double r0 = 0.3;
    double s0 = 3.0;
    double strike = 3.0;
    double maturity = 0.3;
    double t = 0.0;
};

inline constexpr std::array<std::string_view, 12> kConfigKeys{
    "alpha", "hurst", "mu_r", "sigma_r", "mu_s", "sigma_s", "rho", "r0", "s0", "strike", "maturity", "t"};

/// Address of the field behind `key`, or nullptr for an unknown key.
[[nodiscard]] inline double* config_field(RunInputs& in, std::string_view key) {
    if (key == "alpha") return &in.params.alpha;
    if (key == "hurst") return &in.params.hurst;
    if (key == "mu_r") return &in.params.mu_r;
    if (key == "sigma_r") return &in.params.sigma_r;
    if (key == "mu_s") return &in.params.mu_s;
    if (key == "sigma_s") return &in.params.sigma_s;
    if (key == "rho") return &in.params.rho;
    if (key == "r0") return &in.r0;
    if (key == "s0") return &in.s0;
    if (key == "strike") return &in.strike;
    if (key == "maturity") return &in.maturity;
    if (key == "t") return &in.t;
    return nullptr;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view text, const std::string& where) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw DomainError(where + ": not a number: '" + std::string(text) + "'");
    return v;
}

}  // namespace detail

/// Parses `text` into key/value pairs. `source` names the input in messages.
[[nodiscard]] inline std::map<std::string, double> parse_config(std::string_view text,
                                                                const std::string& source = "config") {
    std::map<std::string, double> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const std::string where = source + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw DomainError(where + ": expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        RunInputs probe;
        if (!config_field(probe, key)) throw DomainError(where + ": unknown key '" + key + "'");
        if (out.count(key)) throw DomainError(where + ": duplicate key '" + key + "'");
        out[key] = detail::parse_number(detail::trim(line.substr(eq + 1)), where);
    }
    return out;
}

[[nodiscard]] inline std::map<std::string, double> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

/// Overwrites the fields named in `values`; later calls take precedence.
inline void apply_config(RunInputs& in, const std::map<std::string, double>& values) {
    for (const auto& [key, v] : values) {
        double* field = config_field(in, key);
        if (!field) throw DomainError("unknown key '" + key + "'");
        *field = v;
    }
}

}  // namespace sfm
