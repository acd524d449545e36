#pragma once

#include <string_view>

#include "magblock/hilbert.hpp"

namespace magblock {

enum class Statistics { bunching, poissonian, antibunching };

std::string_view to_string(Statistics s) noexcept;

inline constexpr double occupation_floor = 1e-14;
inline constexpr double poissonian_band = 1e-6;

// The mode index is 1-based; rho must be a full state whose dims follow
// HilbertSpec::dims() (qubit first).
double occupation(const DensityMatrix& rho, int mode);

// <m^dag m^dag m m> / <m^dag m>^2 from the full state. Throws
// undefined_correlation when <m^dag m> is at or below occupation_floor.
double g2_zero_delay(const DensityMatrix& rho, int mode);

// <1| rho_mode |1>, the population of the one-quantum Fock level.
double single_excitation_probability(const DensityMatrix& rho, int mode);

Statistics classify_statistics(double g2, double band = poissonian_band);

struct BlockadeMetrics {
    double g2_zero = 0.0;
    double p1 = 0.0;
    double occupation = 0.0;
    Statistics classification = Statistics::poissonian;
    int n_max = 0;
};

BlockadeMetrics blockade_metrics(const DensityMatrix& rho, int mode, int n_max);

} // namespace magblock
