#include "magblock/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "magblock/error.hpp"

namespace magblock {

void ModelParams::validate() const
{
    auto fail = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, m); };
    if (n_modes < 1)
        fail("n_modes must be >= 1");
    if (!(coupling >= 0.0))
        fail("coupling must be >= 0");
    if (!(probe_rabi >= 0.0) || !(drive_rabi >= 0.0))
        fail("Rabi frequencies must be >= 0");
    if (!(decay >= 0.0))
        fail("decay must be >= 0");
    if (!std::isfinite(detuning) || !std::isfinite(phase) || !std::isfinite(coupling)
        || !std::isfinite(probe_rabi) || !std::isfinite(drive_rabi) || !std::isfinite(decay))
        fail("parameters must be finite");
    if (fock_cutoff < 1)
        fail("fock_cutoff must be >= 1");
}

void ModelParams::require_dissipative() const
{
    validate();
    if (!(decay > 0.0))
        throw Error(ErrorCode::invalid_argument, "decay must be > 0: no steady state without dissipation");
}

ModelParams ModelParams::with_cutoff(int n_max) const
{
    ModelParams p = *this;
    p.fock_cutoff = n_max;
    return p;
}

namespace {

void check_spec(const ModelParams& p, const HilbertSpec& spec)
{
    p.validate();
    if (spec.n_modes != p.n_modes) {
        throw Error(ErrorCode::dimension_mismatch,
                    "Hilbert space has " + std::to_string(spec.n_modes) + " modes, parameters have "
                        + std::to_string(p.n_modes));
    }
    if (spec.fock_cutoff < 1)
        throw Error(ErrorCode::invalid_argument, "fock_cutoff must be >= 1");
}

} // namespace

QuantumOperator excitation_number(const HilbertSpec& spec)
{
    const auto exc = spec.excitation_numbers();
    Matrix n = Matrix::Zero(spec.dimension(), spec.dimension());
    for (std::size_t i = 0; i < exc.size(); ++i)
        n(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = exc[i];
    return {std::move(n), spec};
}

QuantumOperator build_effective_hamiltonian(const ModelParams& p, const HilbertSpec& spec)
{
    check_spec(p, spec);
    const Matrix sm = embed(qubit_lowering(), site::qubit, spec).matrix();
    const Matrix sp = sm.adjoint();

    // H = Delta * N_exc + X + X^dag with
    // X = J sum_j m_j sigma_+ + Omega_m sum_j m_j^dag + Omega_q e^{-i theta} sigma_+.
    // Building the off-diagonal part as X + X^dag keeps H exactly Hermitian.
    Matrix x = p.probe_rabi * std::polar(1.0, -p.phase) * sp;
    const LocalOperator a = fock_annihilation(spec.fock_cutoff);
    for (int j = 1; j <= p.n_modes; ++j) {
        const Matrix m = embed(a, site::mode(j), spec).matrix();
        x += p.coupling * (m * sp);
        x += p.drive_rabi * m.adjoint();
    }
    Matrix h = p.detuning * excitation_number(spec).matrix();
    h += x + x.adjoint();
    return {std::move(h), spec};
}

QuantumOperator build_nonhermitian_hamiltonian(const ModelParams& p, const HilbertSpec& spec)
{
    auto h = build_effective_hamiltonian(p, spec);
    return h - Complex{0.0, 0.5 * p.decay} * excitation_number(spec);
}

std::vector<Dissipator> build_dissipators(const ModelParams& p, const HilbertSpec& spec)
{
    check_spec(p, spec);
    std::vector<Dissipator> out;
    out.reserve(static_cast<std::size_t>(p.n_modes) + 1);
    out.push_back({embed(qubit_lowering(), site::qubit, spec), p.decay});
    const LocalOperator a = fock_annihilation(spec.fock_cutoff);
    for (int j = 1; j <= p.n_modes; ++j)
        out.push_back({embed(a, site::mode(j), spec), p.decay});
    return out;
}

EffectiveParams derive_effective_params(const CavityMediatedParams& c)
{
    const auto n = c.qubit_cavity_couplings.size();
    if (n == 0 || c.magnon_cavity_couplings.size() != n || c.qubit_magnon_detunings.size() != n
        || c.qubit_cavity_detunings.size() != n)
        throw Error(ErrorCode::invalid_argument, "cavity-mediated parameter lists must be nonempty and equally long");

    EffectiveParams eff;
    eff.validity_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double gq = c.qubit_cavity_couplings[j];
        const double gm = c.magnon_cavity_couplings[j];
        const double dm = c.qubit_magnon_detunings[j];
        const double dc = c.qubit_cavity_detunings[j];
        if (dm == 0.0)
            throw Error(ErrorCode::singular, "qubit-magnon detuning " + std::to_string(j + 1)
                                                 + " is zero: adiabatic elimination is singular");
        if (dc == 0.0 && gq != 0.0)
            throw Error(ErrorCode::singular, "qubit-cavity detuning " + std::to_string(j + 1)
                                                 + " is zero: adiabatic elimination is singular");
        eff.couplings.push_back(gq * gm / dm);
        eff.magnon_shifts.push_back(gm * gm / dm);
        if (gq != 0.0)
            eff.qubit_shift += gq * gq / dc;
        const double g = std::max(std::abs(gq), std::abs(gm));
        if (g > 0.0)
            eff.validity_ratio = std::min(eff.validity_ratio, std::abs(dm) / g);
    }
    eff.dispersive_valid = eff.validity_ratio >= dispersive_ratio_threshold;
    if (!eff.dispersive_valid) {
        std::ostringstream os;
        os << "dispersive elimination questionable: min |Delta_m|/g = " << eff.validity_ratio << " < "
           << dispersive_ratio_threshold;
        eff.warning = os.str();
    }
    return eff;
}

ModelParams apply_effective_params(const ModelParams& base, const EffectiveParams& eff, double rel_tol)
{
    if (static_cast<int>(eff.couplings.size()) != base.n_modes)
        throw Error(ErrorCode::dimension_mismatch, "number of effective couplings differs from n_modes");
    auto spread = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return std::abs(*hi - *lo) / std::max({std::abs(*hi), std::abs(*lo), 1e-300});
    };
    if (spread(eff.couplings) > rel_tol)
        throw Error(ErrorCode::invalid_argument, "effective couplings differ between modes; the model needs J_1 = ... = J_N");
    if (spread(eff.magnon_shifts) > rel_tol)
        throw Error(ErrorCode::invalid_argument, "dispersive magnon shifts differ between modes");
    ModelParams p = base;
    p.coupling = eff.couplings.front();
    if (p.coupling < 0.0) {
        // sigma_- -> -sigma_- flips the sign of J and of the probe term.
        p.coupling = -p.coupling;
        p.phase += std::numbers::pi;
    }
    p.validate();
    return p;
}

} // namespace magblock
