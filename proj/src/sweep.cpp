#include "magblock/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "magblock/analytic.hpp"
#include "magblock/error.hpp"

namespace magblock {

std::string_view to_string(Axis a) noexcept
{
    switch (a) {
    case Axis::delta_over_j: return "delta_over_j";
    case Axis::probe_over_drive: return "probe_over_drive";
    case Axis::theta: return "theta";
    case Axis::drive_rabi: return "drive_rabi";
    case Axis::kappa: return "kappa";
    }
    return "unknown";
}

Axis parse_axis(std::string_view name)
{
    for (Axis a : {Axis::delta_over_j, Axis::probe_over_drive, Axis::theta, Axis::drive_rabi, Axis::kappa})
        if (to_string(a) == name)
            return a;
    throw Error(ErrorCode::config, "unknown axis '" + std::string(name)
                                       + "' (expected delta_over_j, probe_over_drive, theta, drive_rabi or kappa)");
}

Engines parse_engines(std::string_view name)
{
    if (name == "numeric")
        return {true, false};
    if (name == "analytic")
        return {false, true};
    if (name == "both")
        return {true, true};
    throw Error(ErrorCode::config, "unknown engine '" + std::string(name) + "' (expected numeric, analytic or both)");
}

ModelParams apply_axis(const ModelParams& base, Axis axis, double value)
{
    ModelParams p = base;
    switch (axis) {
    case Axis::delta_over_j: p.detuning = value * base.coupling; break;
    case Axis::probe_over_drive: p.probe_rabi = value * base.drive_rabi; break;
    case Axis::theta: p.phase = value; break;
    case Axis::drive_rabi: {
        if (base.drive_rabi > 0.0)
            p.probe_rabi = base.probe_rabi / base.drive_rabi * value;
        p.drive_rabi = value;
        break;
    }
    case Axis::kappa: p.decay = value; break;
    }
    return p;
}

void SweepSpec::validate() const
{
    base.validate();
    if (grid.empty())
        throw Error(ErrorCode::config, "sweep grid is empty");
    const bool up = grid.size() < 2 || grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
            throw Error(ErrorCode::config, "sweep grid must be strictly monotone");
    if (!engines.numeric && !engines.analytic)
        throw Error(ErrorCode::config, "no engine selected");
    if (threads < 0)
        throw Error(ErrorCode::config, "threads must be >= 0");
}

double safe_log10(double x)
{
    return std::log10(std::max(x, DBL_MIN));
}

std::vector<double> linear_grid(double start, double stop, int points)
{
    if (points < 1)
        throw Error(ErrorCode::config, "grid_points must be >= 1");
    if (points == 1)
        return {start};
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[i] = start + (stop - start) * i / (points - 1);
    g.back() = stop;
    return g;
}

std::vector<double> geometric_grid(double start, double stop, int points)
{
    if (!(start > 0.0) || !(stop > 0.0))
        throw Error(ErrorCode::config, "log grid needs positive endpoints");
    auto g = linear_grid(std::log(start), std::log(stop), points);
    for (double& x : g)
        x = std::exp(x);
    g.front() = start;
    if (points > 1)
        g.back() = stop;
    return g;
}

BlockadeMetrics numeric_metrics(const ModelParams& p, const TruncationPolicy& policy)
{
    p.validate();
    p.require_dissipative();
    if (!policy.automatic) {
        const DensityMatrix rho = steady_state(p, policy.options.liouvillian);
        return blockade_metrics(rho, 1, p.fock_cutoff);
    }
    const Observable g2 = [](const DensityMatrix& rho, const HilbertSpec&) { return g2_zero_delay(rho, 1); };
    const TruncationResult res = converge_truncation(p, g2, policy.options);
    const DensityMatrix rho(res.state, p.with_cutoff(res.n_max_used).hilbert_spec().dims());
    return blockade_metrics(rho, 1, res.n_max_used);
}

namespace {

void append_error(std::string& acc, const char* engine, const std::string& what)
{
    if (!acc.empty())
        acc += "; ";
    acc += engine;
    acc += ": ";
    acc += what;
}

SweepRecord evaluate_point(const SweepSpec& spec, double x)
{
    SweepRecord rec;
    rec.axis_value = x;
    const ModelParams p = apply_axis(spec.base, spec.axis, x);
    if (spec.engines.numeric) {
        try {
            const auto m = numeric_metrics(p, spec.truncation);
            rec.g2_numeric = m.g2_zero;
            rec.p1 = m.p1;
            rec.occupation = m.occupation;
            rec.n_max = m.n_max;
            rec.classification = m.classification;
        } catch (const std::exception& e) {
            append_error(rec.error, "numeric", e.what());
        }
    }
    if (spec.engines.analytic) {
        try {
            const auto amps = amplitudes(p);
            rec.g2_analytic = g2_analytic(amps).exact;
            rec.weak_drive_certified = amps.weak_drive_certified;
            if (!rec.classification)
                rec.classification = classify_statistics(*rec.g2_analytic);
        } catch (const std::exception& e) {
            append_error(rec.error, "analytic", e.what());
        }
    }
    return rec;
}

} // namespace

std::vector<SweepRecord> run_sweep(const SweepSpec& spec)
{
    spec.validate();
    const std::size_t n = spec.grid.size();
    std::vector<SweepRecord> out(n);
    unsigned workers = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(spec.threads);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = evaluate_point(spec, spec.grid[i]);
            } catch (const std::exception& e) {
                out[i].axis_value = spec.grid[i];
                out[i].error = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
        return out;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back(work);
    pool.clear();
    return out;
}

std::size_t count_failures(const std::vector<SweepRecord>& records)
{
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const SweepRecord& r) { return !r.error.empty(); }));
}

namespace {

void put_number(std::string& s, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    s += buf;
}

void put_optional(std::string& s, const std::optional<double>& v)
{
    if (v)
        put_number(s, *v);
}

} // namespace

std::string to_csv(const std::vector<SweepRecord>& records)
{
    std::string s(csv_header);
    s += '\n';
    for (const auto& r : records) {
        put_number(s, r.axis_value);
        s += ',';
        put_optional(s, r.g2_numeric);
        s += ',';
        if (r.g2_numeric)
            put_number(s, safe_log10(*r.g2_numeric));
        s += ',';
        put_optional(s, r.g2_analytic);
        s += ',';
        if (r.g2_analytic)
            put_number(s, safe_log10(*r.g2_analytic));
        s += ',';
        put_optional(s, r.p1);
        s += ',';
        put_optional(s, r.occupation);
        s += ',';
        if (r.n_max)
            s += std::to_string(*r.n_max);
        s += ',';
        if (r.classification)
            s += to_string(*r.classification);
        s += '\n';
    }
    return s;
}

namespace {

double objective_value(const ModelParams& base, const MinimumSearch& search, double x)
{
    const ModelParams p = apply_axis(base, search.axis, x);
    if (search.engine == Engine::analytic) {
        const auto amps = amplitudes(p);
        if (search.objective == Objective::maximize_occupation)
            return -amps.p_g1;
        return safe_log10(g2_analytic(amps).exact);
    }
    TruncationPolicy fixed;
    fixed.automatic = false;
    const auto m = numeric_metrics(p, fixed);
    if (search.objective == Objective::maximize_occupation)
        return -m.occupation;
    return safe_log10(m.g2_zero);
}

double reported_value(const MinimumSearch& search, double objective)
{
    return search.objective == Objective::maximize_occupation ? -objective : std::pow(10.0, objective);
}

} // namespace

MinimumResult find_minimum(const ModelParams& base, const MinimumSearch& search)
{
    base.validate();
    if (!(search.hi > search.lo))
        throw Error(ErrorCode::invalid_argument, "find_minimum: bracket must satisfy lo < hi");
    if (search.coarse_points < 3)
        throw Error(ErrorCode::invalid_argument, "find_minimum: need at least 3 coarse points");
    if (!(search.rel_tol > 0.0))
        throw Error(ErrorCode::invalid_argument, "find_minimum: rel_tol must be > 0");

    MinimumResult res;
    auto f = [&](double x) {
        ++res.evaluations;
        return objective_value(base, search, x);
    };

    const auto grid = linear_grid(search.lo, search.hi, search.coarse_points);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        values[i] = f(grid[i]);
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    if (best == 0 || best + 1 == grid.size()) {
        throw Error(ErrorCode::not_converged,
                    "no interior minimum in [" + std::to_string(search.lo) + ", " + std::to_string(search.hi)
                        + "] along " + std::string(to_string(search.axis)));
    }

    constexpr double inv_phi = 0.6180339887498949;
    double a = grid[best - 1], b = grid[best + 1];
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    const double floor = 1e-12 * (search.hi - search.lo);
    while (b - a > std::max(search.rel_tol * std::abs(0.5 * (a + b)), floor)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    // Keep the best node seen in case the objective is flat at the tolerance.
    if (values[best] < fx) {
        x = grid[best];
        fx = values[best];
    }
    res.argmin = x;
    res.value = reported_value(search, fx);
    return res;
}

namespace {

std::optional<double> loglog_slope(const std::vector<double>& n, const std::vector<double>& y)
{
    if (n.size() < 2)
        return std::nullopt;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        mx += std::log(n[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double dx = std::log(n[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0)
        return std::nullopt;
    return sxy / sxx;
}

} // namespace

ScalingReport verify_scaling(const ScalingOptions& options)
{
    if (options.n_list.empty())
        throw Error(ErrorCode::invalid_argument, "verify_scaling: empty N list");
    if (!(options.r > 0.0) || !(options.coupling > 0.0) || !(options.drive_rabi > 0.0))
        throw Error(ErrorCode::invalid_argument, "verify_scaling: r, coupling and drive_rabi must be > 0");

    ScalingReport report;
    std::vector<double> ns, deltas, probes, thetas;
    for (int n : options.n_list) {
        ScalingRow row;
        row.n_modes = n;
        try {
            if (n < 1)
                throw Error(ErrorCode::invalid_argument, "N must be >= 1");
            int cutoff = options.fock_cutoff;
            while (cutoff > 2 && HilbertSpec{n, cutoff}.dimension() > options.max_hilbert_dimension)
                --cutoff;
            row.fock_cutoff = cutoff;

            const double sn = std::sqrt(static_cast<double>(n));
            ModelParams p;
            p.n_modes = n;
            p.coupling = options.coupling;
            p.decay = options.r * options.coupling;
            p.drive_rabi = options.drive_rabi;
            p.probe_rabi = 3.0 * sn * options.drive_rabi;
            p.phase = 0.0;
            p.fock_cutoff = cutoff;
            p.detuning = sn * options.coupling;

            MinimumSearch s;
            s.engine = Engine::numeric;

            s.axis = Axis::delta_over_j;
            s.objective = Objective::maximize_occupation;
            s.lo = 0.5;
            s.hi = 2.5;
            row.delta_over_j = find_minimum(p, s).argmin;
            p = apply_axis(p, Axis::delta_over_j, row.delta_over_j);

            s.axis = Axis::probe_over_drive;
            s.objective = Objective::minimize_g2;
            s.lo = 1.0;
            s.hi = 10.0;
            row.probe_over_drive = find_minimum(p, s).argmin;
            p = apply_axis(p, Axis::probe_over_drive, row.probe_over_drive);

            s.axis = Axis::theta;
            s.lo = 0.0;
            s.hi = 1.5 * options.r;
            const auto th = find_minimum(p, s);
            row.theta_scaled = th.argmin / options.r;
            row.g2_min = th.value;

            ns.push_back(n);
            deltas.push_back(row.delta_over_j);
            probes.push_back(row.probe_over_drive);
            thetas.push_back(row.theta_scaled);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    report.delta_exponent = loglog_slope(ns, deltas);
    report.probe_exponent = loglog_slope(ns, probes);
    report.theta_exponent = loglog_slope(ns, thetas);
    return report;
}

std::vector<std::string> preset_names()
{
    return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
}

namespace {

std::string label_of(const char* key, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%g", key, v);
    return buf;
}

SweepSpec preset_spec(const ModelParams& base, Axis axis, std::vector<double> grid, int threads)
{
    SweepSpec s;
    s.base = base;
    s.axis = axis;
    s.grid = std::move(grid);
    s.engines = {true, true};
    s.threads = threads;
    return s;
}

// Phase sweeps for the weak-drive comparison: N modes at the optimal detuning
// and probe ratio, one curve per mode drive.
Preset phase_preset(const char* name, int n_modes, double coupling, double decay, double theta_stop, int threads)
{
    Preset pr{name, {}};
    const double sn = std::sqrt(static_cast<double>(n_modes));
    for (double om : {0.001, 0.05, 0.1}) {
        ModelParams p;
        p.n_modes = n_modes;
        p.coupling = coupling;
        p.decay = decay;
        p.detuning = sn * coupling;
        p.drive_rabi = om;
        p.probe_rabi = 3.0 * sn * om;
        pr.curves.push_back({label_of("drive_rabi", om),
                             preset_spec(p, Axis::theta, linear_grid(0.0, theta_stop, 121), threads)});
    }
    return pr;
}

// Drive sweeps at the optimal point, one curve per decay rate.
Preset drive_preset(const char* name, int n_modes, double coupling, int threads)
{
    Preset pr{name, {}};
    for (double k : {0.1, 0.5, 1.0, 1.5}) {
        ModelParams p = optimal_params(n_modes, coupling, k, 0.005);
        pr.curves.push_back({label_of("kappa", k),
                             preset_spec(p, Axis::drive_rabi, geometric_grid(0.005, 0.5, 41), threads)});
    }
    return pr;
}

} // namespace

Preset make_preset(std::string_view name, int threads)
{
    using std::numbers::pi;
    using std::numbers::sqrt2;
    if (name == "fig2")
        return phase_preset("fig2", 1, 35.0, 0.5, 0.006 * pi, threads);
    if (name == "fig3")
        return drive_preset("fig3", 1, 35.0, threads);
    if (name == "fig4") {
        Preset pr{"fig4", {}};
        for (double ratio : {1.0, 2.0, 5.0, 10.0}) {
            ModelParams p;
            p.n_modes = 2;
            p.coupling = 20.0;
            p.decay = 1.0;
            p.drive_rabi = 0.1;
            p.probe_rabi = ratio * 0.1;
            pr.curves.push_back({label_of("probe_over_drive", ratio),
                                 preset_spec(p, Axis::delta_over_j, linear_grid(-2.5, 2.5, 201), threads)});
        }
        return pr;
    }
    if (name == "fig5") {
        Preset pr{"fig5", {}};
        for (double j : {1.0, 5.0, 10.0, 20.0}) {
            ModelParams p;
            p.n_modes = 2;
            p.coupling = j;
            p.decay = 1.0;
            p.detuning = sqrt2 * j;
            p.drive_rabi = 0.1;
            pr.curves.push_back({label_of("coupling", j),
                                 preset_spec(p, Axis::probe_over_drive, linear_grid(0.0, 10.0, 201), threads)});
        }
        return pr;
    }
    if (name == "fig6")
        return phase_preset("fig6", 2, 20.0, 0.5, 0.008 * pi, threads);
    if (name == "fig7")
        return drive_preset("fig7", 2, 20.0, threads);
    throw Error(ErrorCode::config, "unknown preset '" + std::string(name) + "' (expected fig2..fig7)");
}

} // namespace magblock
