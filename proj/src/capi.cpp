#include "magblock/magblock.h"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "magblock/analytic.hpp"
#include "magblock/config.hpp"
#include "magblock/error.hpp"
#include "magblock/sweep.hpp"

struct mb_config {
    magblock::RunConfig cfg;
};

struct mb_sweep {
    std::vector<magblock::SweepRecord> records;
};

struct mb_preset {
    std::vector<std::string> labels;
    std::vector<mb_sweep> curves;
};

namespace {

thread_local std::string last_error;

mb_status map_code(magblock::ErrorCode c)
{
    using magblock::ErrorCode;
    switch (c) {
    case ErrorCode::invalid_argument: return MB_ERR_INVALID_ARGUMENT;
    case ErrorCode::config: return MB_ERR_CONFIG;
    case ErrorCode::dimension_mismatch:
    case ErrorCode::dimension_overflow: return MB_ERR_DIMENSION;
    case ErrorCode::singular: return MB_ERR_SINGULAR;
    case ErrorCode::non_unique_steady_state: return MB_ERR_NON_UNIQUE;
    case ErrorCode::not_converged: return MB_ERR_NOT_CONVERGED;
    case ErrorCode::undefined_correlation: return MB_ERR_UNDEFINED;
    }
    return MB_ERR_INTERNAL;
}

mb_status fail(mb_status s, std::string msg)
{
    last_error = std::move(msg);
    return s;
}

// Runs f, translating exceptions into a status and last_error.
template <class F>
mb_status guarded(F&& f) noexcept
{
    try {
        f();
        return MB_OK;
    } catch (const magblock::Error& e) {
        return fail(map_code(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(MB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MB_ERR_INTERNAL, "unknown exception");
    }
}

int classification_code(const std::optional<magblock::Statistics>& s)
{
    if (!s)
        return MB_CLASS_NONE;
    switch (*s) {
    case magblock::Statistics::bunching: return MB_CLASS_BUNCHING;
    case magblock::Statistics::poissonian: return MB_CLASS_POISSONIAN;
    case magblock::Statistics::antibunching: return MB_CLASS_ANTIBUNCHING;
    }
    return MB_CLASS_NONE;
}

char* copy_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

#define MB_REQUIRE(cond, what) \
    if (!(cond))               \
    return fail(MB_ERR_INVALID_ARGUMENT, what)

} // namespace

extern "C" {

const char* mb_status_string(mb_status status)
{
    switch (status) {
    case MB_OK: return "ok";
    case MB_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MB_ERR_CONFIG: return "config error";
    case MB_ERR_DIMENSION: return "dimension error";
    case MB_ERR_SINGULAR: return "singular";
    case MB_ERR_NON_UNIQUE: return "non-unique steady state";
    case MB_ERR_NOT_CONVERGED: return "not converged";
    case MB_ERR_UNDEFINED: return "undefined correlation";
    case MB_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mb_classification_string(int classification)
{
    switch (classification) {
    case MB_CLASS_BUNCHING: return "bunching";
    case MB_CLASS_POISSONIAN: return "poissonian";
    case MB_CLASS_ANTIBUNCHING: return "antibunching";
    default: return "";
    }
}

const char* mb_last_error(void)
{
    return last_error.c_str();
}

const char* mb_version(void)
{
    return "0.1.0";
}

mb_status mb_config_create(mb_config** out)
{
    MB_REQUIRE(out, "mb_config_create: out is NULL");
    return guarded([&] { *out = new mb_config{}; });
}

void mb_config_destroy(mb_config* cfg)
{
    delete cfg;
}

mb_status mb_config_set(mb_config* cfg, const char* key, const char* value)
{
    MB_REQUIRE(cfg && key && value, "mb_config_set: NULL argument");
    return guarded([&] { cfg->cfg.set(key, value); });
}

mb_status mb_config_load_file(mb_config* cfg, const char* path)
{
    MB_REQUIRE(cfg && path, "mb_config_load_file: NULL argument");
    return guarded([&] { cfg->cfg.load_file(path); });
}

mb_status mb_config_get_double(const mb_config* cfg, const char* key, double* out)
{
    MB_REQUIRE(cfg && key && out, "mb_config_get_double: NULL argument");
    return guarded([&] { *out = cfg->cfg.get(key); });
}

mb_status mb_config_engines(const mb_config* cfg, int* numeric, int* analytic)
{
    MB_REQUIRE(cfg && numeric && analytic, "mb_config_engines: NULL argument");
    const auto e = cfg->cfg.engines();
    *numeric = e.numeric ? 1 : 0;
    *analytic = e.analytic ? 1 : 0;
    return MB_OK;
}

mb_status mb_steady_metrics(const mb_config* cfg, mb_metrics* out)
{
    MB_REQUIRE(cfg && out, "mb_steady_metrics: NULL argument");
    return guarded([&] {
        const auto m = magblock::numeric_metrics(cfg->cfg.params(), cfg->cfg.truncation());
        *out = {m.g2_zero, magblock::safe_log10(m.g2_zero), m.p1, m.occupation, m.n_max,
                classification_code(m.classification)};
    });
}

mb_status mb_analytic_g2(const mb_config* cfg, mb_analytic* out)
{
    MB_REQUIRE(cfg && out, "mb_analytic_g2: NULL argument");
    return guarded([&] {
        const auto amps = magblock::amplitudes(cfg->cfg.params());
        const auto g = magblock::g2_analytic(amps);
        *out = {g.exact, g.approx, amps.p_g1, amps.p_g2, amps.weak_drive_certified ? 1 : 0};
    });
}

mb_status mb_optimal_conditions(int n_modes, double r, mb_optimum* out)
{
    MB_REQUIRE(out, "mb_optimal_conditions: out is NULL");
    return guarded([&] {
        const auto c = magblock::optimal_conditions(n_modes, r);
        *out = {c.delta_over_j, c.probe_over_drive, c.theta_general,
                c.theta_exact.value_or(std::numeric_limits<double>::quiet_NaN()), c.theta_exact ? 1 : 0};
    });
}

mb_status mb_sweep_run(const mb_config* cfg, mb_sweep** out)
{
    MB_REQUIRE(cfg && out, "mb_sweep_run: NULL argument");
    return guarded([&] {
        auto s = std::make_unique<mb_sweep>();
        s->records = magblock::run_sweep(cfg->cfg.sweep_spec());
        *out = s.release();
    });
}

size_t mb_sweep_rows(const mb_sweep* sweep)
{
    return sweep ? sweep->records.size() : 0;
}

size_t mb_sweep_failures(const mb_sweep* sweep)
{
    return sweep ? magblock::count_failures(sweep->records) : 0;
}

mb_status mb_sweep_row(const mb_sweep* sweep, size_t index, mb_row* out)
{
    MB_REQUIRE(sweep && out, "mb_sweep_row: NULL argument");
    MB_REQUIRE(index < sweep->records.size(), "mb_sweep_row: index out of range");
    const auto& r = sweep->records[index];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *out = {r.axis_value,
            r.g2_numeric.value_or(nan),
            r.g2_analytic.value_or(nan),
            r.p1.value_or(nan),
            r.occupation.value_or(nan),
            r.n_max.value_or(0),
            classification_code(r.classification),
            r.g2_numeric ? 1 : 0,
            r.g2_analytic ? 1 : 0,
            r.error.empty() ? nullptr : r.error.c_str()};
    return MB_OK;
}

mb_status mb_sweep_csv(const mb_sweep* sweep, char** out)
{
    MB_REQUIRE(sweep && out, "mb_sweep_csv: NULL argument");
    return guarded([&] { *out = copy_string(magblock::to_csv(sweep->records)); });
}

void mb_sweep_destroy(mb_sweep* sweep)
{
    delete sweep;
}

void mb_string_free(char* s)
{
    std::free(s);
}

const char* mb_preset_name(size_t index)
{
    static const auto names = magblock::preset_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

mb_status mb_preset_run(const char* name, int threads, mb_preset** out)
{
    MB_REQUIRE(name && out, "mb_preset_run: NULL argument");
    return guarded([&] {
        const auto preset = magblock::make_preset(name, threads);
        auto p = std::make_unique<mb_preset>();
        for (const auto& c : preset.curves) {
            p->labels.push_back(c.label);
            p->curves.push_back({magblock::run_sweep(c.spec)});
        }
        *out = p.release();
    });
}

size_t mb_preset_curves(const mb_preset* preset)
{
    return preset ? preset->curves.size() : 0;
}

const char* mb_preset_label(const mb_preset* preset, size_t index)
{
    return preset && index < preset->labels.size() ? preset->labels[index].c_str() : nullptr;
}

const mb_sweep* mb_preset_curve(const mb_preset* preset, size_t index)
{
    return preset && index < preset->curves.size() ? &preset->curves[index] : nullptr;
}

void mb_preset_destroy(mb_preset* preset)
{
    delete preset;
}

mb_status mb_find_minimum(const mb_config* cfg, const char* axis, double lo, double hi, const char* engine,
                          const char* objective, double* argmin, double* value)
{
    MB_REQUIRE(cfg && axis && engine && objective && argmin && value, "mb_find_minimum: NULL argument");
    return guarded([&] {
        magblock::MinimumSearch s;
        s.axis = magblock::parse_axis(axis);
        s.lo = lo;
        s.hi = hi;
        const std::string e = engine, o = objective;
        if (e == "numeric")
            s.engine = magblock::Engine::numeric;
        else if (e == "analytic")
            s.engine = magblock::Engine::analytic;
        else
            throw magblock::Error(magblock::ErrorCode::config, "engine must be numeric or analytic");
        if (o == "min-g2")
            s.objective = magblock::Objective::minimize_g2;
        else if (o == "max-occupation")
            s.objective = magblock::Objective::maximize_occupation;
        else
            throw magblock::Error(magblock::ErrorCode::config, "objective must be min-g2 or max-occupation");
        const auto res = magblock::find_minimum(cfg->cfg.params(), s);
        *argmin = res.argmin;
        *value = res.value;
    });
}

mb_status mb_verify_scaling(const int* n_list, size_t count, double r, mb_scaling_row* rows, double exponents[3])
{
    MB_REQUIRE(n_list && rows && exponents && count > 0, "mb_verify_scaling: NULL argument or empty list");
    return guarded([&] {
        magblock::ScalingOptions opt;
        opt.n_list.assign(n_list, n_list + count);
        opt.r = r;
        const auto rep = magblock::verify_scaling(opt);
        for (size_t i = 0; i < count; ++i) {
            const auto& row = rep.rows[i];
            rows[i] = {row.n_modes, row.fock_cutoff, row.delta_over_j, row.probe_over_drive, row.theta_scaled,
                       row.g2_min, row.error.empty() ? MB_OK : MB_ERR_NOT_CONVERGED};
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        exponents[0] = rep.delta_exponent.value_or(nan);
        exponents[1] = rep.probe_exponent.value_or(nan);
        exponents[2] = rep.theta_exponent.value_or(nan);
        // Per-N failures leave the call successful; the last one is kept for diagnostics.
        for (const auto& row : rep.rows)
            if (!row.error.empty())
                last_error = "N=" + std::to_string(row.n_modes) + ": " + row.error;
    });
}

} // extern "C"
