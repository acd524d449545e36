#include "magblock/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "magblock/analytic.hpp"
#include "magblock/error.hpp"

namespace magblock {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected)
{
    throw Error(ErrorCode::config,
                "invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " + expected + ")");
}

double to_double(std::string_view key, std::string_view v)
{
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x))
        bad_value(key, v, "a finite number");
    return x;
}

int to_int(std::string_view key, std::string_view v)
{
    int x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        bad_value(key, v, "an integer");
    return x;
}

} // namespace

const std::vector<std::string>& RunConfig::keys()
{
    static const std::vector<std::string> k{
        "n_modes", "delta", "coupling", "probe_rabi", "drive_rabi", "phase", "decay", "fock_cutoff",
        "engine", "axis", "grid_start", "grid_stop", "grid_points", "grid_scale", "threads"};
    return k;
}

void RunConfig::set(std::string_view key, std::string_view raw)
{
    key = trim(key);
    const std::string_view v = trim(raw);
    if (key == "n_modes") {
        params_.n_modes = to_int(key, v);
        if (params_.n_modes < 1)
            bad_value(key, v, "an integer >= 1");
    } else if (key == "delta") {
        params_.detuning = to_double(key, v);
    } else if (key == "coupling") {
        params_.coupling = to_double(key, v);
    } else if (key == "probe_rabi") {
        params_.probe_rabi = to_double(key, v);
    } else if (key == "drive_rabi") {
        params_.drive_rabi = to_double(key, v);
    } else if (key == "phase") {
        optimal_phase_ = v == "opt";
        if (!optimal_phase_)
            params_.phase = to_double(key, v);
    } else if (key == "decay") {
        params_.decay = to_double(key, v);
    } else if (key == "fock_cutoff") {
        auto_cutoff_ = v == "auto";
        if (!auto_cutoff_) {
            params_.fock_cutoff = to_int(key, v);
            if (params_.fock_cutoff < 1)
                bad_value(key, v, "'auto' or an integer >= 1");
        }
    } else if (key == "engine") {
        engines_ = parse_engines(v);
    } else if (key == "axis") {
        axis_ = parse_axis(v);
    } else if (key == "grid_start") {
        grid_start_ = to_double(key, v);
    } else if (key == "grid_stop") {
        grid_stop_ = to_double(key, v);
    } else if (key == "grid_points") {
        grid_points_ = to_int(key, v);
        if (grid_points_ < 1)
            bad_value(key, v, "an integer >= 1");
    } else if (key == "grid_scale") {
        if (v == "lin")
            grid_log_ = false;
        else if (v == "log")
            grid_log_ = true;
        else
            bad_value(key, v, "lin or log");
    } else if (key == "threads") {
        threads_ = to_int(key, v);
        if (threads_ < 0)
            bad_value(key, v, "an integer >= 0");
    } else {
        throw Error(ErrorCode::config, "unknown config key '" + std::string(key) + "'");
    }
}

void RunConfig::load_text(std::string_view text)
{
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::config, "line " + std::to_string(line_no) + ": expected key=value");
        set(line.substr(0, eq), line.substr(eq + 1));
    }
}

void RunConfig::load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::config, "cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    load_text(os.str());
}

ModelParams RunConfig::params() const
{
    ModelParams p = params_;
    if (optimal_phase_) {
        if (!(p.coupling > 0.0) || !(p.decay > 0.0))
            throw Error(ErrorCode::config, "phase=opt needs coupling > 0 and decay > 0");
        p.phase = optimal_phase(p.n_modes, p.decay / p.coupling);
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::config, e.what());
    }
    return p;
}

TruncationPolicy RunConfig::truncation() const
{
    TruncationPolicy t;
    t.automatic = auto_cutoff_;
    return t;
}

std::vector<double> RunConfig::grid() const
{
    if (grid_points_ < 1)
        throw Error(ErrorCode::config, "grid_points is required for a sweep");
    return grid_log_ ? geometric_grid(grid_start_, grid_stop_, grid_points_)
                     : linear_grid(grid_start_, grid_stop_, grid_points_);
}

SweepSpec RunConfig::sweep_spec() const
{
    SweepSpec s;
    s.base = params();
    s.axis = axis_;
    s.grid = grid();
    s.engines = engines_;
    s.truncation = truncation();
    s.threads = threads_;
    s.validate();
    return s;
}

double RunConfig::get(std::string_view key) const
{
    const ModelParams p = params();
    if (key == "n_modes") return p.n_modes;
    if (key == "delta") return p.detuning;
    if (key == "coupling") return p.coupling;
    if (key == "probe_rabi") return p.probe_rabi;
    if (key == "drive_rabi") return p.drive_rabi;
    if (key == "phase") return p.phase;
    if (key == "decay") return p.decay;
    if (key == "fock_cutoff") return auto_cutoff_ ? 0.0 : p.fock_cutoff;
    if (key == "grid_start") return grid_start_;
    if (key == "grid_stop") return grid_stop_;
    if (key == "grid_points") return grid_points_;
    if (key == "threads") return threads_;
    throw Error(ErrorCode::config, "no numeric value for key '" + std::string(key) + "'");
}

} // namespace magblock
