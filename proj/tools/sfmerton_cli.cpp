// sfmerton: bond and option quotes, comparison tables, sample paths and the
// acceptance checks from the command line.
//
// Exit codes: 0 success, 1 invalid input, 2 a check failed.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sfmerton/checks.hpp>
#include <sfmerton/config.hpp>
#include <sfmerton/io.hpp>
#include <sfmerton/pricing.hpp>
#include <sfmerton/simulate.hpp>

namespace {

using namespace sfm;

struct ModelFlags {
    std::string config;
    std::map<std::string, std::optional<double>> values;
};

// One flag per config key, with '_' spelled '-' on the command line.
void add_model_flags(CLI::App& app, ModelFlags& flags) {
    app.add_option("--config", flags.config, "key = value file; flags override it")->check(CLI::ExistingFile);
    for (auto key : kConfigKeys) {
        std::string name(key);
        std::string flag = "--" + name;
        for (auto& c : flag)
            if (c == '_') c = '-';
        app.add_option(flag, flags.values[name], "model/contract input '" + name + "'");
    }
}

RunInputs resolve(const ModelFlags& flags) {
    RunInputs in;
    if (!flags.config.empty()) apply_config(in, load_config_file(flags.config));
    std::map<std::string, double> given;
    for (const auto& [k, v] : flags.values)
        if (v) given[k] = *v;
    apply_config(in, given);
    return in;
}

struct Output {
    std::string format;
    std::string path;
};

void emit(const Output& out, const std::string& content) {
    if (out.path.empty())
        std::cout << content << std::flush;
    else
        write_file_atomic(out.path, content);
}

// The first allowed format is the default.
void require_format(std::string& format, std::initializer_list<const char*> allowed, const char* cmd) {
    if (format.empty()) format = *allowed.begin();
    for (const char* a : allowed)
        if (format == a) return;
    throw DomainError(std::string("format '") + format + "' is not supported by " + cmd);
}

OptionKind parse_kind(const std::string& k) {
    if (k == "call") return OptionKind::Call;
    if (k == "put") return OptionKind::Put;
    throw DomainError("kind must be call or put");
}

std::vector<double> default_spots() { return {2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0}; }

std::string bond_text(const BondQuote& b, ModelVariant v) {
    std::ostringstream os;
    os << "variant      " << to_string(v) << "\n"
       << "bond price   " << fmt17(b.price) << "\n"
       << "f1           " << fmt17(b.f1) << "\n"
       << "tau          " << fmt17(b.tau) << "\n";
    return os.str();
}

std::string quote_text(const OptionQuote& q, ModelVariant v, const std::optional<OriginQuote>& o) {
    std::ostringstream os;
    os << "variant         " << to_string(v) << "\n"
       << "kind            " << to_string(q.kind) << "\n"
       << "price           " << fmt17(q.price) << "\n"
       << "d1              " << fmt17(q.d1) << "\n"
       << "d2              " << fmt17(q.d2) << "\n"
       << "bond price      " << fmt17(q.bond.price) << "\n"
       << "total variance  " << fmt17(q.variance.total_variance) << "\n";
    if (q.intrinsic) os << "note            zero variance, intrinsic value returned\n";
    if (o) {
        os << "origin form     price " << fmt17(o->price) << "  (r_bar " << fmt17(o->r_bar) << ", sigma_bar^2 "
           << fmt17(o->sigma_bar_sq) << ")\n"
           << "printed form    price " << fmt17(o->price_printed) << "  (sigma_bar^2 "
           << fmt17(o->sigma_bar_sq_printed) << ")\n"
           << "note            the printed sigma_bar^2 omits a factor 2 on its cross and quadratic terms\n";
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subdiffusive fractional Merton model: quotes, tables, paths and checks"};
    app.require_subcommand(1);

    ModelFlags flags;
    Output out;
    std::string kind = "call";
    std::uint64_t seed = 42;
    unsigned workers = 1;

    auto* bond = app.add_subcommand("bond", "zero-coupon bond P(r0, t, maturity)");
    auto* price_cmd = app.add_subcommand("price", "European option (--kind call|put)");
    auto* table = app.add_subcommand("table", "four-variant price grid");
    auto* paths = app.add_subcommand("paths", "sample paths of T_alpha, r and S");
    auto* check = app.add_subcommand("check", "run the acceptance suites");

    for (auto* sub : {bond, price_cmd, table, paths}) add_model_flags(*sub, flags);
    for (auto* sub : {bond, price_cmd, table, paths, check}) {
        sub->add_option("--output,-o", out.path, "write to this file instead of stdout");
        sub->add_option("--workers", workers, "threads for simulation")->check(CLI::Range(1u, 256u));
    }
    bond->add_option("--format", out.format, "json (default), csv or text");
    price_cmd->add_option("--format", out.format, "json (default), csv or text");
    price_cmd->add_option("--kind", kind, "call|put")->default_val("call");

    std::vector<double> spots = default_spots(), maturities{0.2, 1.0};
    table->add_option("--format", out.format, "csv (default), text or json");
    table->add_option("--spots", spots, "spot grid")->delimiter(',');
    table->add_option("--maturities", maturities, "maturity grid")->delimiter(',');

    std::size_t steps = 1000, n_paths = 1;
    double horizon = 1.0, resolution = 0.0;
    paths->add_option("--format", out.format, "csv");
    paths->add_option("--seed", seed, "random seed");
    paths->add_option("--steps", steps, "time steps on [0, horizon]")->check(CLI::PositiveNumber);
    paths->add_option("--horizon", horizon, "last time")->check(CLI::PositiveNumber);
    paths->add_option("--n-paths", n_paths, "number of paths")->check(CLI::PositiveNumber);
    paths->add_option("--resolution", resolution, "operational-time lattice step (default: steps/10 finer)");

    check->add_option("--format", out.format, "text (default) or json");
    check->add_option("--seed", seed, "random seed for the Monte Carlo suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*bond) {
            require_format(out.format, {"json", "csv", "text"}, "bond");
            const auto in = resolve(flags);
            const auto v = classify(validate(in.params));
            const auto q = bond_price(in.params, in.r0, in.t, in.maturity);
            if (out.format == "json")
                emit(out, dump_json(bond_json(q, v)));
            else if (out.format == "csv")
                emit(out, "price,f1,tau,variant\n" + fmt17(q.price) + "," + fmt17(q.f1) + "," + fmt17(q.tau) + "," +
                              std::string(to_string(v)) + "\n");
            else
                emit(out, bond_text(q, v));
        } else if (*price_cmd) {
            require_format(out.format, {"json", "csv", "text"}, "price");
            const auto in = resolve(flags);
            const auto v = classify(validate(in.params));
            const Contract c{in.strike, in.maturity, in.t, parse_kind(kind)};
            const MarketState m{in.r0, in.s0};
            const auto q = price(in.params, m, c);
            std::optional<OriginQuote> origin;
            if (in.t == 0.0 && in.maturity > 0.0) origin = price_at_origin(in.params, m, c);
            if (out.format == "json") {
                auto j = quote_json(q, v);
                if (origin) j["origin"] = origin_json(*origin);
                emit(out, dump_json(j));
            } else if (out.format == "csv") {
                emit(out, "price,d1,d2,bond_price,total_variance,variant\n" + fmt17(q.price) + "," + fmt17(q.d1) +
                              "," + fmt17(q.d2) + "," + fmt17(q.bond.price) + "," +
                              fmt17(q.variance.total_variance) + "," + std::string(to_string(v)) + "\n");
            } else {
                emit(out, quote_text(q, v, origin));
            }
        } else if (*table) {
            require_format(out.format, {"csv", "text", "json"}, "table");
            const auto in = resolve(flags);
            const auto rows = price_table(in.params, spots, maturities, in.strike, in.r0, in.t);
            if (out.format == "csv") {
                emit(out, table_csv(rows));
            } else if (out.format == "text") {
                emit(out, table_text(rows));
            } else {
                nlohmann::json j = nlohmann::json::array();
                for (const auto& r : rows)
                    j.push_back({{"S", r.spot}, {"T", r.maturity}, {"variant", std::string(to_string(r.variant))},
                                 {"price", r.price}});
                emit(out, dump_json(j));
            }
        } else if (*paths) {
            require_format(out.format, {"csv"}, "paths");
            const auto in = resolve(flags);
            InverseSubordinatorOptions opt;
            opt.step = resolution;
            const auto bundles =
                model_path_ensemble(in.params, in.r0, in.s0, uniform_grid(horizon, steps), seed, n_paths, workers, opt);
            emit(out, paths_csv(bundles));
        } else if (*check) {
            require_format(out.format, {"text", "json"}, "check");
            CheckOptions opt;
            opt.seed = seed;
            opt.workers = workers;
            bool all = true;
            std::string text;
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : run_all_checks(opt)) {
                all = all && r.passed;
                if (out.path.empty() && out.format == "text") std::cout << format_check(r) << std::endl;
                text += format_check(r) + "\n";
                j.push_back({{"id", r.id},
                             {"name", r.name},
                             {"passed", r.passed},
                             {"seconds", r.seconds},
                             {"detail", r.detail}});
            }
            if (out.format == "json")
                emit(out, dump_json(j));
            else if (!out.path.empty())
                emit(out, text);
            return all ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "sfmerton: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
