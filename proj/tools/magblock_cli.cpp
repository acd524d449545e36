// Command-line front end over the C API.
//
//   magblock steady g2 [config options]
//   magblock sweep [config options] [--out FILE]
//   magblock optimize [config options] --axis A --lo X --hi Y [--engine E] [--objective O]
//   magblock verify-scaling [--n 1,2,3] [--r 0.025]
//   magblock preset fig2..fig7 [--out-dir DIR] [--threads N]
//
// Config options: --config FILE, --set key=value (repeatable), or --<key> value
// for any config key. Later sources override earlier ones in that order.
//
// Exit codes: 0 success, 1 config or usage error, 2 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "magblock/magblock.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_solver = 2;

const char* const config_keys[] = {"n_modes",  "delta",      "coupling",  "probe_rabi", "drive_rabi",
                                   "phase",    "decay",      "fock_cutoff", "engine",   "axis",
                                   "grid_start", "grid_stop", "grid_points", "grid_scale", "threads"};

struct ConfigArgs {
    std::string file;
    std::vector<std::string> sets;
    std::map<std::string, std::string> flags;
};

// Keys listed in `own` are claimed by the subcommand itself and get no flag.
void add_config_options(CLI::App* app, ConfigArgs& args, std::initializer_list<std::string_view> own = {})
{
    app->add_option("--config", args.file, "key=value config file");
    app->add_option("--set", args.sets, "key=value override (repeatable)");
    for (const char* key : config_keys) {
        auto& slot = args.flags[key];
        if (std::find(own.begin(), own.end(), key) == own.end())
            app->add_option(std::string("--") + key, slot, std::string("config key ") + key);
    }
}

using ConfigPtr = std::unique_ptr<mb_config, decltype(&mb_config_destroy)>;

int config_error(const char* what)
{
    std::cerr << "error: " << what << ": " << mb_last_error() << "\n";
    return exit_config;
}

// Builds the configuration or returns a nonzero exit code.
int make_config(const ConfigArgs& args, ConfigPtr& out)
{
    mb_config* raw = nullptr;
    if (mb_config_create(&raw) != MB_OK)
        return config_error("config");
    out.reset(raw);
    if (!args.file.empty() && mb_config_load_file(raw, args.file.c_str()) != MB_OK)
        return config_error("config file");
    for (const auto& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
            return exit_config;
        }
        if (mb_config_set(raw, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) != MB_OK)
            return config_error("--set");
    }
    for (const char* key : config_keys) {
        const auto& v = args.flags.at(key);
        if (!v.empty() && mb_config_set(raw, key, v.c_str()) != MB_OK)
            return config_error(key);
    }
    return exit_ok;
}

int status_exit(mb_status s)
{
    return s == MB_ERR_CONFIG || s == MB_ERR_INVALID_ARGUMENT ? exit_config : exit_solver;
}

int report_failure(const char* what, mb_status s)
{
    std::cerr << "error: " << what << " (" << mb_status_string(s) << "): " << mb_last_error() << "\n";
    return status_exit(s);
}

int run_steady(const ConfigArgs& args)
{
    ConfigPtr cfg(nullptr, mb_config_destroy);
    if (int rc = make_config(args, cfg))
        return rc;
    int numeric = 0, analytic = 0;
    mb_config_engines(cfg.get(), &numeric, &analytic);
    int rc = exit_ok;
    if (numeric) {
        mb_metrics m{};
        if (const auto s = mb_steady_metrics(cfg.get(), &m); s != MB_OK) {
            rc = report_failure("numeric steady state", s);
        } else {
            std::printf("g2_numeric=%.12g\nlog10_g2_numeric=%.12g\np1=%.12g\noccupation=%.12g\nn_max=%d\n"
                        "classification=%s\n",
                        m.g2, m.log10_g2, m.p1, m.occupation, m.n_max, mb_classification_string(m.classification));
        }
    }
    if (analytic) {
        mb_analytic a{};
        if (const auto s = mb_analytic_g2(cfg.get(), &a); s != MB_OK) {
            rc = report_failure("analytic amplitudes", s);
        } else {
            std::printf("g2_analytic=%.12g\nlog10_g2_analytic=%.12g\ng2_analytic_approx=%.12g\n"
                        "weak_drive_certified=%d\n",
                        a.g2_exact, std::log10(std::max(a.g2_exact, 2.2250738585072014e-308)), a.g2_approx,
                        a.weak_drive_certified);
        }
    }
    return rc;
}

// Writes the CSV and per-row failures; returns the sweep's exit code.
int emit_sweep(const mb_sweep* sweep, std::ostream& os)
{
    char* csv = nullptr;
    if (const auto s = mb_sweep_csv(sweep, &csv); s != MB_OK)
        return report_failure("csv", s);
    os << csv;
    mb_string_free(csv);
    for (size_t i = 0; i < mb_sweep_rows(sweep); ++i) {
        mb_row row{};
        mb_sweep_row(sweep, i, &row);
        if (row.error)
            std::cerr << "row " << i << " (axis_value=" << row.axis_value << "): " << row.error << "\n";
    }
    return mb_sweep_failures(sweep) ? exit_solver : exit_ok;
}

int run_sweep(const ConfigArgs& args, const std::string& out_path)
{
    ConfigPtr cfg(nullptr, mb_config_destroy);
    if (int rc = make_config(args, cfg))
        return rc;
    mb_sweep* sweep = nullptr;
    if (const auto s = mb_sweep_run(cfg.get(), &sweep); s != MB_OK)
        return report_failure("sweep", s);
    std::unique_ptr<mb_sweep, decltype(&mb_sweep_destroy)> guard(sweep, mb_sweep_destroy);
    if (out_path.empty())
        return emit_sweep(sweep, std::cout);
    std::ofstream f(out_path);
    if (!f) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return exit_config;
    }
    return emit_sweep(sweep, f);
}

struct OptimizeArgs {
    std::string axis = "theta";
    double lo = 0.0;
    double hi = 0.0;
    std::string engine = "analytic";
    std::string objective = "min-g2";
};

int run_optimize(const ConfigArgs& args, const OptimizeArgs& opt)
{
    ConfigPtr cfg(nullptr, mb_config_destroy);
    if (int rc = make_config(args, cfg))
        return rc;
    double argmin = 0.0, value = 0.0;
    const auto s = mb_find_minimum(cfg.get(), opt.axis.c_str(), opt.lo, opt.hi, opt.engine.c_str(),
                                   opt.objective.c_str(), &argmin, &value);
    if (s != MB_OK)
        return report_failure("optimize", s);
    std::printf("axis=%s\nargmin=%.12g\nvalue=%.12g\n", opt.axis.c_str(), argmin, value);
    return exit_ok;
}

int run_scaling(const std::vector<int>& ns, double r)
{
    std::vector<mb_scaling_row> rows(ns.size());
    double exps[3];
    if (const auto s = mb_verify_scaling(ns.data(), ns.size(), r, rows.data(), exps); s != MB_OK)
        return report_failure("verify-scaling", s);
    std::printf("n_modes,fock_cutoff,delta_over_j,probe_over_drive,theta_scaled,g2_min,status\n");
    int rc = exit_ok;
    for (const auto& row : rows) {
        std::printf("%d,%d,%.12g,%.12g,%.12g,%.12g,%s\n", row.n_modes, row.fock_cutoff, row.delta_over_j,
                    row.probe_over_drive, row.theta_scaled, row.g2_min, mb_status_string(row.status));
        if (row.status != MB_OK)
            rc = exit_solver;
    }
    if (rc != exit_ok)
        std::cerr << "error: " << mb_last_error() << "\n";
    std::printf("# exponent delta_over_j=%.6f\n# exponent probe_over_drive=%.6f\n# exponent theta_scaled=%.6f\n",
                exps[0], exps[1], exps[2]);
    return rc;
}

std::string file_safe(std::string s)
{
    for (char& c : s)
        if (c == '=' || c == '/' || c == ' ')
            c = '_';
    return s;
}

int run_preset(const std::string& name, const std::string& out_dir, int threads)
{
    mb_preset* preset = nullptr;
    if (const auto s = mb_preset_run(name.c_str(), threads, &preset); s != MB_OK)
        return report_failure("preset", s);
    std::unique_ptr<mb_preset, decltype(&mb_preset_destroy)> guard(preset, mb_preset_destroy);
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) {
            std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
            return exit_config;
        }
    }
    int rc = exit_ok;
    for (size_t i = 0; i < mb_preset_curves(preset); ++i) {
        const std::string label = mb_preset_label(preset, i);
        int curve_rc = exit_ok;
        if (out_dir.empty()) {
            std::cout << "# curve: " << label << "\n";
            curve_rc = emit_sweep(mb_preset_curve(preset, i), std::cout);
        } else {
            const auto path = std::filesystem::path(out_dir) / (name + "_" + file_safe(label) + ".csv");
            std::ofstream f(path);
            if (!f) {
                std::cerr << "error: cannot write " << path << "\n";
                return exit_config;
            }
            curve_rc = emit_sweep(mb_preset_curve(preset, i), f);
            std::cerr << "wrote " << path.string() << "\n";
        }
        rc = std::max(rc, curve_rc);
    }
    return rc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Magnon blockade simulator"};
    app.set_version_flag("--version", std::string(mb_version()));
    app.require_subcommand(1);

    ConfigArgs steady_args, sweep_args, opt_args;

    auto* steady = app.add_subcommand("steady", "single-point steady state");
    auto* steady_g2 = steady->add_subcommand("g2", "g2(0), P1 and occupation of mode 1");
    steady->require_subcommand(1);
    add_config_options(steady_g2, steady_args);

    auto* sweep = app.add_subcommand("sweep", "one-parameter sweep to CSV");
    add_config_options(sweep, sweep_args);
    std::string sweep_out;
    sweep->add_option("--out", sweep_out, "write CSV here instead of stdout");

    auto* optimize = app.add_subcommand("optimize", "locate the optimum along one axis");
    add_config_options(optimize, opt_args, {"axis", "engine"});
    OptimizeArgs oa;
    optimize->add_option("--axis", oa.axis, "delta_over_j|probe_over_drive|theta|drive_rabi|kappa")->required();
    optimize->add_option("--lo", oa.lo, "bracket start")->required();
    optimize->add_option("--hi", oa.hi, "bracket end")->required();
    optimize->add_option("--engine", oa.engine, "numeric|analytic");
    optimize->add_option("--objective", oa.objective, "min-g2|max-occupation");

    auto* scaling = app.add_subcommand("verify-scaling", "fit the N dependence of the optimal point");
    std::vector<int> ns{1, 2, 3};
    double r = 0.025;
    scaling->add_option("--n", ns, "mode counts")->delimiter(',');
    scaling->add_option("--r", r, "kappa / J");

    auto* preset = app.add_subcommand("preset", "compute a canned data set");
    std::string preset_name, out_dir;
    int threads = 1;
    preset->add_option("name", preset_name, "fig2|fig3|fig4|fig5|fig6|fig7")->required();
    preset->add_option("--out-dir", out_dir, "one CSV per curve in this directory");
    preset->add_option("--threads", threads, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    if (steady_g2->parsed())
        return run_steady(steady_args);
    if (sweep->parsed())
        return run_sweep(sweep_args, sweep_out);
    if (optimize->parsed())
        return run_optimize(opt_args, oa);
    if (scaling->parsed())
        return run_scaling(ns, r);
    if (preset->parsed())
        return run_preset(preset_name, out_dir, threads);
    return exit_config;
}
