#include "magblock/steady_state.hpp"

#include <Eigen/SparseLU>
#ifdef MAGBLOCK_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "magblock/error.hpp"

namespace magblock {

namespace {

using Triplet = Eigen::Triplet<Complex>;

#ifdef MAGBLOCK_HAVE_UMFPACK
using DirectSolver = Eigen::UmfPackLU<SparseMatrix>;
#else
using DirectSolver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;
#endif

void check_dimension(Eigen::Index dim, const LiouvillianOptions& options)
{
    const Eigen::Index super = dim * dim;
    if (super > options.max_dimension) {
        std::ostringstream os;
        os << "Liouvillian dimension " << super << " (Hilbert dimension " << dim << ") exceeds the cap "
           << options.max_dimension << "; lower fock_cutoff or n_modes, or raise the cap for a sparse run";
        throw Error(ErrorCode::dimension_overflow, os.str());
    }
}

// Appends coefficient * (A (x) B) for dense A, B, skipping exact zeros.
void add_kron(std::vector<Triplet>& out, const Matrix& a, const Matrix& b, Complex coefficient)
{
    const auto p = b.rows();
    const auto q = b.cols();
    for (Eigen::Index ac = 0; ac < a.cols(); ++ac)
        for (Eigen::Index ar = 0; ar < a.rows(); ++ar) {
            const Complex va = a(ar, ac);
            if (va == Complex{})
                continue;
            for (Eigen::Index bc = 0; bc < q; ++bc)
                for (Eigen::Index br = 0; br < p; ++br) {
                    const Complex vb = b(br, bc);
                    if (vb == Complex{})
                        continue;
                    out.emplace_back(ar * p + br, ac * q + bc, coefficient * va * vb);
                }
        }
}

double one_norm(const SparseMatrix& a)
{
    double best = 0.0;
    for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(a, k); it; ++it)
            col += std::abs(it.value());
        best = std::max(best, col);
    }
    return best;
}

} // namespace

Liouvillian build_liouvillian(const QuantumOperator& hamiltonian, const std::vector<Dissipator>& channels,
                              const LiouvillianOptions& options)
{
    const auto& spec = hamiltonian.spec();
    const Eigen::Index d = hamiltonian.dimension();
    check_dimension(d, options);

    const Matrix id = Matrix::Identity(d, d);
    const Matrix& h = hamiltonian.matrix();
    std::vector<Triplet> triplets;
    add_kron(triplets, id, h, Complex{0.0, -1.0});
    add_kron(triplets, h.transpose(), id, Complex{0.0, 1.0});
    for (const auto& ch : channels) {
        if (!(ch.op.spec() == spec))
            throw Error(ErrorCode::dimension_mismatch, "dissipator lives on a different Hilbert space");
        if (ch.rate == 0.0)
            continue;
        const Matrix& o = ch.op.matrix();
        const Matrix odo = o.adjoint() * o;
        const double half = 0.5 * ch.rate;
        add_kron(triplets, o.conjugate(), o, 2.0 * half);
        add_kron(triplets, id, odo, -half);
        add_kron(triplets, odo.transpose(), id, -half);
    }
    Liouvillian L;
    L.spec = spec;
    L.matrix.resize(d * d, d * d);
    L.matrix.setFromTriplets(triplets.begin(), triplets.end());
    L.matrix.prune(Complex{}, 0.0);
    L.matrix.makeCompressed();
    return L;
}

Liouvillian build_liouvillian(const ModelParams& p, const HilbertSpec& spec, const LiouvillianOptions& options)
{
    check_dimension(spec.dimension(), options);
    auto L = build_liouvillian(build_effective_hamiltonian(p, spec), build_dissipators(p, spec), options);
    if (p.decay > 0.0) {
        const double drive = std::max(p.probe_rabi, p.drive_rabi);
        L.equilibration_scale = drive > 0.0 ? std::clamp(drive / p.decay, 1e-6, 1.0) : 1.0;
    }
    return L;
}

double trace_preservation_residual(const Liouvillian& L)
{
    const Eigen::Index d = L.spec.dimension();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < L.matrix.outerSize(); ++k) {
        Complex col{};
        for (SparseMatrix::InnerIterator it(L.matrix, k); it; ++it)
            if (it.row() % (d + 1) == 0)
                col += it.value();
        worst = std::max(worst, std::abs(col));
    }
    return worst;
}

Vector vectorize(const Matrix& m)
{
    return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvectorize(const Vector& v, Eigen::Index dim)
{
    if (v.size() != dim * dim)
        throw Error(ErrorCode::dimension_mismatch, "vector length is not dim^2");
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

SteadyStateSolution solve_steady_state_detailed(const Liouvillian& L)
{
    const Eigen::Index d = L.spec.dimension();
    const Eigen::Index n = d * d;
    if (L.matrix.rows() != n || L.matrix.cols() != n)
        throw Error(ErrorCode::dimension_mismatch, "Liouvillian does not match its Hilbert space");

    // Diagonal similarity S^-1 L S with S = diag(s^(e_i + e_j)). In the weak
    // drive regime rho_ij ~ s^(e_i + e_j), so the rescaled unknowns are O(1)
    // and the tiny multi-excitation populations keep their relative accuracy.
    const auto exc = L.spec.excitation_numbers();
    const double s = L.equilibration_scale;
    const int max_exc = *std::max_element(exc.begin(), exc.end());
    std::vector<double> powers(static_cast<std::size_t>(2 * max_exc) + 1, 1.0);
    for (std::size_t k = 1; k < powers.size(); ++k)
        powers[k] = powers[k - 1] * s;
    Eigen::VectorXd scale(n);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            scale(i + j * d) = powers[static_cast<std::size_t>(exc[i] + exc[j])];

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(L.matrix.nonZeros()) + static_cast<std::size_t>(d));
    for (Eigen::Index k = 0; k < L.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(L.matrix, k); it; ++it)
            if (it.row() != 0)
                triplets.emplace_back(it.row(), it.col(), it.value() * (scale(it.col()) / scale(it.row())));
    for (Eigen::Index i = 0; i < d; ++i)
        triplets.emplace_back(0, i * (d + 1), scale(i * (d + 1)));
    SparseMatrix a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();

    DirectSolver lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw Error(ErrorCode::non_unique_steady_state, "non-unique steady state: trace-constrained Liouvillian is singular");

    // Condition estimate ||A||_1 * max ||A^-1 v||_1 / ||v||_1 over a few fixed
    // pseudo-random probes.
    SteadyStateSolution out;
    {
        std::mt19937 rng(20240601u);
        std::normal_distribution<double> normal;
        double inv = 0.0;
        for (int probe = 0; probe < 3; ++probe) {
            Vector v(n);
            for (Eigen::Index k = 0; k < n; ++k)
                v(k) = Complex{normal(rng), normal(rng)};
            const Vector w = lu.solve(v);
            inv = std::max(inv, w.lpNorm<1>() / v.lpNorm<1>());
        }
        out.condition_estimate = one_norm(a) * inv;
    }
    if (!std::isfinite(out.condition_estimate) || out.condition_estimate > 1e14) {
        std::ostringstream os;
        os << "non-unique steady state: trace-constrained Liouvillian is numerically rank deficient "
           << "(condition estimate " << out.condition_estimate << ")";
        throw Error(ErrorCode::non_unique_steady_state, os.str());
    }

    Vector b = Vector::Zero(n);
    b(0) = 1.0;
    Vector y = lu.solve(b);
    for (int sweep = 0; sweep < 2; ++sweep) {
        const Vector r = b - a * y;
        y += lu.solve(r);
    }
    const Vector x = scale.cast<Complex>().cwiseProduct(y);

    Matrix rho = unvectorize(x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    out.generator_norm = L.matrix.norm();
    out.residual = (L.matrix * vectorize(rho)).norm();
    if (!(out.residual <= 1e-10 * out.generator_norm)) {
        std::ostringstream os;
        os << "steady-state solve failed: residual " << out.residual << " exceeds 1e-10 * ||L|| = "
           << 1e-10 * out.generator_norm << " (condition estimate " << out.condition_estimate << ")";
        throw Error(ErrorCode::not_converged, os.str());
    }
    out.rho = std::move(rho);
    return out;
}

DensityMatrix solve_steady_state(const Liouvillian& L)
{
    auto sol = solve_steady_state_detailed(L);
    try {
        return DensityMatrix(std::move(sol.rho), L.spec.dims());
    } catch (const Error& e) {
        throw Error(ErrorCode::not_converged, std::string("steady state failed validation: ") + e.what());
    }
}

DensityMatrix steady_state(const ModelParams& p, const LiouvillianOptions& options)
{
    p.require_dissipative();
    return solve_steady_state(build_liouvillian(p, p.hilbert_spec(), options));
}

EvolutionResult evolve(const Liouvillian& L, const Matrix& rho0, double t_final, double tolerance,
                       int checkpoints)
{
    const Eigen::Index d = L.spec.dimension();
    if (rho0.rows() != d || rho0.cols() != d)
        throw Error(ErrorCode::dimension_mismatch, "initial state does not match the Liouvillian");
    if (!(t_final >= 0.0) || !(tolerance > 0.0) || checkpoints < 1)
        throw Error(ErrorCode::invalid_argument, "evolve: need t_final >= 0, tolerance > 0, checkpoints >= 1");

    // Dormand-Prince 5(4) tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2; (void)c3; (void)c4; (void)c5; // autonomous system

    const SparseMatrix& gen = L.matrix;
    Vector y = vectorize(rho0);
    Vector k1 = gen * y;
    Vector k2, k3, k4, k5, k6, k7, ynew;

    EvolutionResult res;
    double t = 0.0;
    double h = t_final > 0.0 ? std::min(t_final / 100.0, 1e-3) : 0.0;
    Matrix last_checkpoint = rho0;

    for (int cp = 1; cp <= checkpoints; ++cp) {
        const double t_stop = t_final * cp / checkpoints;
        while (t < t_stop) {
            h = std::min(h, t_stop - t);
            k2 = gen * (y + h * (a21 * k1));
            k3 = gen * (y + h * (a31 * k1 + a32 * k2));
            k4 = gen * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = gen * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = gen * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            k7 = gen * ynew;
            const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double ratio = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double sc = tolerance + tolerance * std::max(std::abs(y(i)), std::abs(ynew(i)));
                ratio = std::max(ratio, std::abs(err(i)) / sc);
            }
            if (ratio <= 1.0) {
                t += h;
                y.swap(ynew);
                k1.swap(k7);
                ++res.steps;
            }
            const double factor = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
            if (h < 1e-14 * std::max(1.0, t_final))
                throw Error(ErrorCode::not_converged, "evolve: step size underflow");
        }
        Matrix rho = unvectorize(y, d);
        const Matrix diff = rho - last_checkpoint;
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
        res.checkpoint_distances.push_back(0.5 * es.eigenvalues().cwiseAbs().sum());
        last_checkpoint = std::move(rho);
    }
    res.time = t;
    res.rho = std::move(last_checkpoint);
    return res;
}

DensityMatrix evolve_to_steady_state(const ModelParams& p, const DensityMatrix& rho0, const EvolveOptions& options)
{
    p.require_dissipative();
    const auto spec = p.hilbert_spec();
    if (rho0.dims() != spec.dims())
        throw Error(ErrorCode::dimension_mismatch, "initial state does not match the model's Hilbert space");
    const double t_final = options.t_final > 0.0 ? options.t_final : 40.0 / p.decay;
    const auto L = build_liouvillian(p, spec);
    auto res = evolve(L, rho0.matrix(), t_final, options.tolerance, options.checkpoints);

    const auto& dist = res.checkpoint_distances;
    const double last = dist.back();
    const double mid = dist[dist.size() / 2];
    if (last > 1e-7 && last >= mid) {
        std::ostringstream os;
        os << "evolution did not settle: checkpoint distance " << last << " at t = " << t_final
           << " is not below the mid-run distance " << mid;
        throw Error(ErrorCode::not_converged, os.str());
    }
    Matrix rho = 0.5 * (res.rho + res.rho.adjoint());
    rho /= rho.trace().real();
    return DensityMatrix(std::move(rho), spec.dims());
}

TruncationResult converge_truncation(const ModelParams& p, const Observable& observable,
                                     const TruncationOptions& options)
{
    p.require_dissipative();
    if (!(options.tol > 0.0))
        throw Error(ErrorCode::invalid_argument, "converge_truncation: tol must be > 0");
    if (options.start_cutoff < 1 || options.max_cutoff < options.start_cutoff)
        throw Error(ErrorCode::invalid_argument, "converge_truncation: invalid cutoff range");

    auto trend = [](const std::vector<double>& h, int start) {
        std::ostringstream os;
        for (std::size_t k = 0; k < h.size(); ++k)
            os << (k ? ", " : "") << "n_max=" << start + static_cast<int>(k) << ": " << h[k];
        return os.str();
    };

    TruncationResult res;
    Matrix previous;
    for (int n = options.start_cutoff; n <= options.max_cutoff; ++n) {
        const ModelParams q = p.with_cutoff(n);
        const HilbertSpec spec = q.hilbert_spec();
        if (spec.dimension() * spec.dimension() > options.liouvillian.max_dimension) {
            throw Error(ErrorCode::not_converged,
                        "truncation did not converge before the dimension cap (n_max=" + std::to_string(n)
                            + "); trend: " + trend(res.history, options.start_cutoff));
        }
        DensityMatrix rho = solve_steady_state(build_liouvillian(q, spec, options.liouvillian));
        const double v = observable(rho, spec);
        if (!res.history.empty()) {
            const double prev = res.history.back();
            const double denom = std::max(std::abs(v), std::abs(prev));
            const double change = denom > 0.0 ? std::abs(v - prev) / denom : 0.0;
            if (change < options.tol) {
                res.value = prev;
                res.n_max_used = n - 1;
                res.state = std::move(previous);
                res.history.push_back(v);
                return res;
            }
        }
        res.history.push_back(v);
        previous = rho.matrix();
    }
    throw Error(ErrorCode::not_converged, "truncation did not converge by n_max=" + std::to_string(options.max_cutoff)
                                              + "; trend: " + trend(res.history, options.start_cutoff));
}

} // namespace magblock
