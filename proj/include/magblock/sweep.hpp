#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magblock/model.hpp"
#include "magblock/observables.hpp"
#include "magblock/steady_state.hpp"

namespace magblock {

// Swept parameter. delta_over_j sets Delta = x J; probe_over_drive sets
// Omega_q = x Omega_m; drive_rabi sets Omega_m = x and keeps the base
// Omega_q / Omega_m ratio; kappa sets the decay rate.
enum class Axis { delta_over_j, probe_over_drive, theta, drive_rabi, kappa };

std::string_view to_string(Axis a) noexcept;
Axis parse_axis(std::string_view name); // throws ErrorCode::config

ModelParams apply_axis(const ModelParams& base, Axis axis, double value);

struct Engines {
    bool numeric = true;
    bool analytic = false;
};

Engines parse_engines(std::string_view name); // numeric | analytic | both

// automatic: escalate the cutoff until g2 is stable (relative options.tol).
// Otherwise the base fock_cutoff is used as is.
struct TruncationPolicy {
    bool automatic = true;
    TruncationOptions options{};
};

struct SweepSpec {
    ModelParams base;
    Axis axis = Axis::theta;
    std::vector<double> grid;
    Engines engines;
    TruncationPolicy truncation;
    int threads = 1; // 0 selects the hardware concurrency

    void validate() const;
};

struct SweepRecord {
    double axis_value = 0.0;
    std::optional<double> g2_numeric;
    std::optional<double> g2_analytic;
    std::optional<double> p1;
    std::optional<double> occupation;
    std::optional<int> n_max;
    std::optional<Statistics> classification;
    bool weak_drive_certified = false;
    std::string error; // empty on success; engines that succeeded still report
};

// log10 with the argument floored at the smallest normal double, so the
// emitted value is always finite.
double safe_log10(double x);

std::vector<double> linear_grid(double start, double stop, int points);
std::vector<double> geometric_grid(double start, double stop, int points);

// One record per grid point, in grid order, regardless of thread count.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec);

std::size_t count_failures(const std::vector<SweepRecord>& records);

inline constexpr std::string_view csv_header =
    "axis_value,g2_numeric,log10_g2_numeric,g2_analytic,log10_g2_analytic,p1,occupation,n_max,classification";

std::string to_csv(const std::vector<SweepRecord>& records);

// Numeric steady-state metrics at one parameter point under a policy.
BlockadeMetrics numeric_metrics(const ModelParams& p, const TruncationPolicy& policy = {});

enum class Engine { numeric, analytic };
enum class Objective { minimize_g2, maximize_occupation };

struct MinimumSearch {
    Axis axis = Axis::theta;
    double lo = 0.0;
    double hi = 0.0;
    Engine engine = Engine::analytic;
    Objective objective = Objective::minimize_g2;
    int coarse_points = 21;
    double rel_tol = 1e-5;
    // The numeric engine uses base.fock_cutoff throughout so the objective
    // stays smooth along the search.
};

struct MinimumResult {
    double argmin = 0.0;
    double value = 0.0; // g2, or the occupation for maximize_occupation
    int evaluations = 0;
};

// Coarse grid followed by golden-section refinement around the best node.
// Throws not_converged when the best coarse node lies on the bracket edge.
MinimumResult find_minimum(const ModelParams& base, const MinimumSearch& search);

struct ScalingOptions {
    std::vector<int> n_list{1, 2, 3};
    double r = 0.025;              // kappa / J
    double coupling = 20.0;
    double drive_rabi = 0.001;
    int fock_cutoff = 3;           // lowered per N to respect max_hilbert_dimension
    Eigen::Index max_hilbert_dimension = 100;
};

struct ScalingRow {
    int n_modes = 0;
    int fock_cutoff = 0;
    double delta_over_j = 0.0;     // argmax of the occupation at theta = 0
    double probe_over_drive = 0.0; // argmin of g2 at Delta*
    double theta_scaled = 0.0;     // argmin theta * J / kappa at (Delta*, Omega_q*)
    double g2_min = 0.0;
    std::string error;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    // Least-squares slopes of log(ratio) against log(N) over successful rows.
    std::optional<double> delta_exponent;
    std::optional<double> probe_exponent;
    std::optional<double> theta_exponent;
};

ScalingReport verify_scaling(const ScalingOptions& options = {});

struct PresetCurve {
    std::string label;
    SweepSpec spec;
};

struct Preset {
    std::string name;
    std::vector<PresetCurve> curves;
};

std::vector<std::string> preset_names();
Preset make_preset(std::string_view name, int threads = 1); // throws ErrorCode::config

} // namespace magblock
