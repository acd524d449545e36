#include "magblock/analytic.hpp"

#include <cmath>
#include <numbers>

#include "magblock/error.hpp"

namespace magblock {

namespace {

using std::numbers::sqrt2;

constexpr double singular_tol = 1e-300;

void require_nonsingular(Complex den, const char* what)
{
    if (std::abs(den) <= singular_tol)
        throw Error(ErrorCode::singular, std::string("analytic amplitudes singular at resonance: ") + what);
}

void check(const ModelParams& p)
{
    p.validate();
}

// One-excitation sector: [dt, N J; J, dt] (c_e0, c_g1) = -(Omega_q e^{-i theta}, Omega_m).
struct OneExcitation {
    Complex c_e0;
    Complex c_g1;
};

OneExcitation one_excitation(const ModelParams& p, Complex dt)
{
    const double nj2 = p.n_modes * p.coupling * p.coupling;
    const Complex den = dt * dt - nj2;
    require_nonsingular(den, "dt^2 = N J^2");
    const Complex probe = p.probe_rabi * std::polar(1.0, -p.phase);
    return {(p.n_modes * p.coupling * p.drive_rabi - dt * probe) / den,
            (p.coupling * probe - p.drive_rabi * dt) / den};
}

void certify(AmplitudeSet& s)
{
    const double lead = std::abs(s.c_g1);
    double sub = std::max(std::abs(s.c_e1), std::abs(s.c_g2));
    if (s.n_modes > 1)
        sub = std::max(sub, std::abs(s.c_g11));
    s.weak_drive_certified = lead > 0.0 && sub <= 0.1 * lead;
}

// Exact symmetric two-excitation sector for N modes, unknowns (c_e1, c_g2, c_g11):
//   2dt c_e1 + sqrt2 J c_g2 + (N-1) J c_g11 = -(Omega_q e^{-i theta} c_g1 + Omega_m c_e0)
//   sqrt2 J c_e1 + 2dt c_g2                 = -sqrt2 Omega_m c_g1
//   2 J c_e1 + 2dt c_g11                    = -2 Omega_m c_g1
void two_excitation_symmetric(const ModelParams& p, Complex dt, AmplitudeSet& s)
{
    const double j = p.coupling;
    const Complex probe = p.probe_rabi * std::polar(1.0, -p.phase);
    Eigen::Matrix3cd m;
    m << 2.0 * dt, sqrt2 * j, (p.n_modes - 1) * j,
         sqrt2 * j, 2.0 * dt, 0.0,
         2.0 * j, 0.0, 2.0 * dt;
    Eigen::Vector3cd rhs;
    rhs << -(probe * s.c_g1 + p.drive_rabi * s.c_e0), -sqrt2 * p.drive_rabi * s.c_g1, -2.0 * p.drive_rabi * s.c_g1;
    if (p.n_modes == 1) {
        // No pair state; solve the leading 2x2 block.
        Eigen::Matrix2cd m2 = m.topLeftCorner<2, 2>();
        require_nonsingular(m2.determinant(), "two-excitation sector");
        const Eigen::Vector2cd x = m2.partialPivLu().solve(rhs.head<2>());
        s.c_e1 = x(0);
        s.c_g2 = x(1);
        s.c_g11 = 0.0;
        return;
    }
    require_nonsingular(m.determinant(), "two-excitation sector");
    const Eigen::Vector3cd x = m.partialPivLu().solve(rhs);
    s.c_e1 = x(0);
    s.c_g2 = x(1);
    s.c_g11 = x(2);
}

} // namespace

AnalyticIntermediates analytic_intermediates(const ModelParams& p)
{
    check(p);
    AnalyticIntermediates in;
    const double d = p.detuning, j = p.coupling, k = p.decay;
    const double oq = p.probe_rabi, om = p.drive_rabi, th = p.phase;
    in.delta_tilde = Complex{d, -0.5 * k};
    in.r = j > 0.0 ? k / j : std::numeric_limits<double>::infinity();

    const Complex dt = in.delta_tilde;
    const Complex probe = oq * std::polar(1.0, -th);
    if (std::abs(dt) > singular_tol) {
        in.a_general = j * probe - (2.0 * dt + p.n_modes * j * j / dt) * om;
        in.b_general = j * om * probe / dt;
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        in.a_general = in.b_general = Complex{nan, nan};
    }

    in.a_closed = (2 * j * j + 4 * d * d - k * k) * om * om + 2 * j * j * oq * oq * std::cos(2 * th)
                  - 8 * d * j * om * oq * std::cos(th) + 4 * j * k * om * oq * std::sin(th);
    in.b_closed = -2 * j * j * oq * oq * std::sin(2 * th) + 8 * d * j * om * oq * std::sin(th)
                  + 4 * j * k * om * oq * std::cos(th) - 4 * d * k * om * om;

    in.a_prime = 12 * sqrt2 * in.r * th - in.r * in.r;
    in.b_prime = -24 * th + 8 * sqrt2 * in.r;
    return in;
}

AmplitudeSet amplitudes_general_n(const ModelParams& p)
{
    check(p);
    AmplitudeSet s;
    s.n_modes = p.n_modes;
    s.intermediates = analytic_intermediates(p);
    const Complex dt = s.intermediates.delta_tilde;
    require_nonsingular(dt, "dt = 0");
    const double j = p.coupling;

    const auto one = one_excitation(p, dt);
    s.c_e0 = one.c_e0;
    s.c_g1 = one.c_g1;

    const Complex den2 = 4.0 * dt * dt - 2.0 * j * j;
    require_nonsingular(den2, "2 dt^2 = J^2");
    s.c_g2 = sqrt2 * (s.intermediates.a_general * s.c_g1 - s.intermediates.b_general) / den2;
    const Complex probe = p.probe_rabi * std::polar(1.0, -p.phase);
    s.c_e1 = -(probe * s.c_g1 + p.drive_rabi * s.c_e0 + sqrt2 * j * s.c_g2) / (2.0 * dt);
    s.pair_neglected = p.n_modes > 1;
    // The pair amplitude implied by the truncated solution, for certification only.
    s.c_g11 = p.n_modes > 1 ? -(j * s.c_e1 + p.drive_rabi * s.c_g1) / dt : Complex{};

    s.p_g1 = std::norm(s.c_g1);
    s.p_g2 = std::norm(s.c_g2);
    certify(s);
    return s;
}

AmplitudeSet amplitudes_n1(const ModelParams& p, bool small_theta)
{
    check(p);
    if (p.n_modes != 1)
        throw Error(ErrorCode::invalid_argument, "amplitudes_n1 requires n_modes = 1");
    AmplitudeSet s;
    s.n_modes = 1;
    s.intermediates = analytic_intermediates(p);
    const Complex dt = s.intermediates.delta_tilde;
    const auto one = one_excitation(p, dt);
    s.c_e0 = one.c_e0;
    s.c_g1 = one.c_g1;
    two_excitation_symmetric(p, dt, s);

    const double d = p.detuning, j = p.coupling, k = p.decay;
    const double oq = p.probe_rabi, om = p.drive_rabi, th = p.phase;
    if (!small_theta) {
        const double den1 = 4 * std::norm(j * j - dt * dt);
        const double den2 = 8 * std::norm((j * j - 2.0 * dt * dt) * (j * j - dt * dt));
        require_nonsingular(den1, "J^2 = dt^2");
        require_nonsingular(den2, "J^2 = 2 dt^2");
        const double x = d * om - j * oq * std::cos(th);
        const double y = 2 * j * oq * std::sin(th) - k * om;
        s.p_g1 = (4 * x * x + y * y) / den1;
        const double a = s.intermediates.a_closed, b = s.intermediates.b_closed;
        s.p_g2 = (a * a + b * b) / den2;
    } else {
        const double r = s.intermediates.r;
        const double u = 6 * th - r;
        s.p_g1 = (64 + 4 * u * u) * om * om / (k * k) / (r * r + 16);
        const double v = 12 * r * th - r * r;
        const double w = 12 * th - 8 * r;
        const double den = ((r * r - 2) * (r * r - 2) + 16 * r * r) * (std::pow(r, 4) + 16 * r * r);
        // Prefactor 8 is the theta -> 0 limit of the exact closed form.
        s.p_g2 = 8 * (v * v + w * w) * std::pow(om, 4) / std::pow(j, 4) / den;
    }
    certify(s);
    return s;
}

AmplitudeSet amplitudes_n2(const ModelParams& p, bool small_theta)
{
    check(p);
    if (p.n_modes != 2)
        throw Error(ErrorCode::invalid_argument, "amplitudes_n2 requires n_modes = 2");
    AmplitudeSet s;
    s.n_modes = 2;
    s.intermediates = analytic_intermediates(p);
    const Complex dt = s.intermediates.delta_tilde;
    const auto one = one_excitation(p, dt);
    s.c_e0 = one.c_e0;
    s.c_g1 = one.c_g1;
    two_excitation_symmetric(p, dt, s);

    const double d = p.detuning, j = p.coupling, k = p.decay;
    const double oq = p.probe_rabi, om = p.drive_rabi, th = p.phase;
    if (!small_theta) {
        const double den1 = 4 * std::norm(2 * j * j - dt * dt);
        const double den2 = 32 * std::norm((j * j - dt * dt) * (2 * j * j - dt * dt));
        require_nonsingular(den1, "2 J^2 = dt^2");
        require_nonsingular(den2, "J^2 = dt^2");
        const double x = d * om - j * oq * std::cos(th);
        const double y = 2 * j * oq * std::sin(th) - om * k;
        s.p_g1 = (4 * x * x + y * y) / den1;
        const double a = s.intermediates.a_closed + 2 * j * j * om * om;
        const double b = s.intermediates.b_closed;
        s.p_g2 = (a * a + b * b) / den2;
    } else {
        const double r = s.intermediates.r;
        // The bracket is squared, matching the N = 1 expansion and the exact form.
        const double u = 6 * sqrt2 * th - r;
        s.p_g1 = (128 + 4 * u * u) * om * om / (k * k) / (r * r + 32);
        const double ap = s.intermediates.a_prime, bp = s.intermediates.b_prime;
        const double den = ((r * r - 4) * (r * r - 4) + 32 * r * r) * (std::pow(r, 4) + 32 * r * r);
        s.p_g2 = 8 * (ap * ap + bp * bp) * std::pow(om, 4) / std::pow(j, 4) / den;
    }
    certify(s);
    return s;
}

AmplitudeSet amplitudes(const ModelParams& p)
{
    switch (p.n_modes) {
    case 1: return amplitudes_n1(p);
    case 2: return amplitudes_n2(p);
    default: return amplitudes_general_n(p);
    }
}

AnalyticG2 g2_analytic(const AmplitudeSet& amps)
{
    if (!(amps.p_g1 > 0.0))
        throw Error(ErrorCode::undefined_correlation, "analytic g2 undefined: |c_g1| = 0");
    double n = amps.p_g1 + std::norm(amps.c_e1) + 2 * amps.p_g2;
    if (amps.n_modes > 1 && !amps.pair_neglected)
        n += (amps.n_modes - 1) * std::norm(amps.c_g11);
    return {2 * amps.p_g2 / (n * n), 2 * amps.p_g2 / (amps.p_g1 * amps.p_g1)};
}

OptimalConditions optimal_conditions(int n_modes, double r)
{
    if (n_modes < 1)
        throw Error(ErrorCode::invalid_argument, "optimal_conditions: n_modes must be >= 1");
    if (!(r > 0.0))
        throw Error(ErrorCode::invalid_argument, "optimal_conditions: r = kappa / J must be > 0");
    const double sn = std::sqrt(static_cast<double>(n_modes));
    OptimalConditions c;
    c.delta_over_j = sn;
    c.probe_over_drive = 3 * sn;
    c.theta_general = 2 * r / (3 * sn);
    if (n_modes == 1)
        c.theta_exact = r * (8 + r * r) / (12 * (1 + r * r));
    else if (n_modes == 2)
        c.theta_exact = r * (16 + r * r) / (12 * sqrt2 * (2 + r * r));
    return c;
}

double optimal_phase(int n_modes, double r)
{
    const auto c = optimal_conditions(n_modes, r);
    return c.theta_exact.value_or(c.theta_general);
}

ModelParams optimal_params(int n_modes, double coupling, double decay, double drive_rabi)
{
    if (!(coupling > 0.0))
        throw Error(ErrorCode::invalid_argument, "optimal_params: coupling must be > 0");
    const auto c = optimal_conditions(n_modes, decay / coupling);
    ModelParams p;
    p.n_modes = n_modes;
    p.coupling = coupling;
    p.decay = decay;
    p.detuning = c.delta_over_j * coupling;
    p.drive_rabi = drive_rabi;
    p.probe_rabi = c.probe_over_drive * drive_rabi;
    p.phase = c.theta_exact.value_or(c.theta_general);
    return p;
}

} // namespace magblock
