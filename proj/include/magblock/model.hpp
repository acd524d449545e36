#pragma once

#include <string>
#include <vector>

#include "magblock/hilbert.hpp"

namespace magblock {

// Rotating-frame parameters of the driven qubit + N-mode system. All rates
// are in units of gamma (gamma / 2pi = 1 MHz); the phase is in radians.
// The qubit and every mode share the same detuning, decay rate and drive.
struct ModelParams {
    int n_modes = 1;
    double detuning = 0.0;   // Delta
    double coupling = 0.0;   // J
    double probe_rabi = 0.0; // Omega_q, drives the qubit
    double drive_rabi = 0.0; // Omega_m, drives every mode
    double phase = 0.0;      // theta, probe phase relative to the mode drive
    double decay = 1.0;      // kappa
    int fock_cutoff = 4;

    // Checks N >= 1, J, Omega >= 0, kappa >= 0, cutoff >= 1. Steady-state
    // solvers additionally require kappa > 0 (require_dissipative).
    void validate() const;
    void require_dissipative() const;

    HilbertSpec hilbert_spec() const { return {n_modes, fock_cutoff}; }
    ModelParams with_cutoff(int n_max) const;
};

QuantumOperator build_effective_hamiltonian(const ModelParams& p, const HilbertSpec& spec);
QuantumOperator build_nonhermitian_hamiltonian(const ModelParams& p, const HilbertSpec& spec);

// Total excitation number sigma_+ sigma_- + sum_j m_j^dag m_j.
QuantumOperator excitation_number(const HilbertSpec& spec);

struct Dissipator {
    QuantumOperator op;
    double rate; // enters the master equation as (rate/2) (2 o rho o^dag - {o^dag o, rho})
};

// One channel for the qubit (sigma_-) followed by one per mode (m_j).
std::vector<Dissipator> build_dissipators(const ModelParams& p, const HilbertSpec& spec);

// Dispersive two-cavity realization: each mode j talks to the qubit through
// its own far-detuned cavity arm.
struct CavityMediatedParams {
    std::vector<double> qubit_cavity_couplings;   // g_{q_j}
    std::vector<double> magnon_cavity_couplings;  // g_{m_j}
    std::vector<double> qubit_magnon_detunings;   // Delta_{m_j}
    std::vector<double> qubit_cavity_detunings;   // Delta_{c_j}, used for the qubit shift
};

struct EffectiveParams {
    std::vector<double> couplings;     // J_j = g_{q_j} g_{m_j} / Delta_{m_j}
    double qubit_shift = 0.0;          // sum_j g_{q_j}^2 / Delta_{c_j}
    std::vector<double> magnon_shifts; // g_{m_j}^2 / Delta_{m_j}
    double validity_ratio = 0.0;       // min_j |Delta_{m_j}| / max(g_{q_j}, g_{m_j})
    bool dispersive_valid = true;      // validity_ratio >= dispersive_ratio_threshold
    std::string warning;
};

inline constexpr double dispersive_ratio_threshold = 5.0;

EffectiveParams derive_effective_params(const CavityMediatedParams& c);

// Maps an eliminated model onto ModelParams. Requires equal couplings (and
// equal magnon shifts) across modes; the shifts are absorbed into the common
// rotating-frame detuning already carried by `base`.
ModelParams apply_effective_params(const ModelParams& base, const EffectiveParams& eff,
                                   double rel_tol = 1e-9);

} // namespace magblock
