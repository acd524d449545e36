#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "magblock/model.hpp"
#include "magblock/sweep.hpp"

namespace magblock {

// Flat key=value run description. Keys:
//   n_modes delta coupling probe_rabi drive_rabi phase decay fock_cutoff
//   engine axis grid_start grid_stop grid_points grid_scale threads
// phase accepts "opt" (optimal phase for N and kappa / J); fock_cutoff
// accepts "auto" (escalate until g2 is stable). Lines starting with '#'
// are comments. Every malformed key or value raises ErrorCode::config.
class RunConfig {
public:
    void set(std::string_view key, std::string_view value);
    void load_text(std::string_view text);
    void load_file(const std::string& path);

    // Parameters with "opt" phase resolved.
    ModelParams params() const;
    TruncationPolicy truncation() const;
    Engines engines() const { return engines_; }
    Axis axis() const { return axis_; }
    std::vector<double> grid() const;
    int threads() const { return threads_; }

    SweepSpec sweep_spec() const;

    // Numeric view of a key, as the model would see it.
    double get(std::string_view key) const;

    static const std::vector<std::string>& keys();

private:
    ModelParams params_{};
    bool optimal_phase_ = false;
    bool auto_cutoff_ = true;
    Engines engines_{};
    Axis axis_ = Axis::theta;
    double grid_start_ = 0.0;
    double grid_stop_ = 0.0;
    int grid_points_ = 0;
    bool grid_log_ = false;
    int threads_ = 1;
};

} // namespace magblock
