#pragma once

#include <optional>

#include "magblock/hilbert.hpp"
#include "magblock/model.hpp"

namespace magblock {

// Weak-drive pure-state model: the steady state of i d|psi>/dt = H_non |psi>
// truncated at two excitations, solved order by order in the drive.
//
// Amplitude naming (mode 1 is the observed mode, the vacuum amplitude is 1):
//   c_e0   |e, 0...0>
//   c_g1   |g, 1_1>            (equal for every mode by symmetry)
//   c_e1   |e, 1_1>
//   c_g2   |g, 2_1>            Fock amplitude, so <m^dag2 m^2> = 2 |c_g2|^2
//   c_g11  |g, 1_1, 1_j>, j != 1
struct AnalyticIntermediates {
    Complex delta_tilde;  // Delta - i kappa / 2
    double r = 0.0;       // kappa / J
    // General-N coefficients:
    //   A = J Omega_q e^{-i theta} - (2 dt + N J^2 / dt) Omega_m,  B = J Omega_m Omega_q e^{-i theta} / dt
    Complex a_general;
    Complex b_general;
    // Real coefficients entering the N = 1 and N = 2 closed forms.
    double a_closed = 0.0;
    double b_closed = 0.0;
    // Small-phase N = 2 coefficients A' = 12 sqrt2 r theta - r^2, B' = -24 theta + 8 sqrt2 r.
    double a_prime = 0.0;
    double b_prime = 0.0;
};

// Needs only dt != 0 (and J > 0 for r); safe at the resonances where the
// amplitudes themselves diverge.
AnalyticIntermediates analytic_intermediates(const ModelParams& p);

struct AmplitudeSet {
    int n_modes = 1;
    Complex c_g0{1.0, 0.0};
    Complex c_e0;
    Complex c_g1;
    Complex c_e1;
    Complex c_g2;
    Complex c_g11;
    bool pair_neglected = false; // c_g11 dropped from the two-excitation equations
    // |c_g1|^2 and |c_g2|^2 as produced by the route that built the set
    // (closed-form expressions for the N = 1 and N = 2 routes).
    double p_g1 = 0.0;
    double p_g2 = 0.0;
    bool weak_drive_certified = false;
    AnalyticIntermediates intermediates;
};

// General N with the pair amplitude dropped (valid for |c_g1| >> |c_g11|).
AmplitudeSet amplitudes_general_n(const ModelParams& p);

// N = 1 closed forms. With small_theta the populations use the expansion
// around Delta = J, Omega_q = 3 Omega_m, theta << 1.
AmplitudeSet amplitudes_n1(const ModelParams& p, bool small_theta = false);

// N = 2 closed forms; small_theta expands around Delta = sqrt2 J,
// Omega_q = 3 sqrt2 Omega_m, theta << 1.
AmplitudeSet amplitudes_n2(const ModelParams& p, bool small_theta = false);

// Picks the sharpest route for p.n_modes.
AmplitudeSet amplitudes(const ModelParams& p);

struct AnalyticG2 {
    double exact = 0.0;  // 2|c_g2|^2 / <n>^2 with <n> from every retained amplitude
    double approx = 0.0; // 2|c_g2|^2 / |c_g1|^4
};

AnalyticG2 g2_analytic(const AmplitudeSet& amps);

struct OptimalConditions {
    double delta_over_j = 0.0;
    double probe_over_drive = 0.0;
    double theta_general = 0.0;          // 2 r / (3 sqrt N)
    std::optional<double> theta_exact;   // N = 1 and N = 2 only
};

OptimalConditions optimal_conditions(int n_modes, double r);

// theta_exact when available, theta_general otherwise.
double optimal_phase(int n_modes, double r);

// Parameters at the optimal point for the given N, J, kappa, Omega_m.
ModelParams optimal_params(int n_modes, double coupling, double decay, double drive_rabi);

} // namespace magblock
