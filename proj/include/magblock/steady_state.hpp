#pragma once

#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "magblock/hilbert.hpp"
#include "magblock/model.hpp"

namespace magblock {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

// Generator of the master equation on column-stacked density matrices:
//   L = -i (I (x) H - H^T (x) I)
//       + sum_k (rate_k / 2) [2 conj(o_k) (x) o_k - I (x) o_k^dag o_k - (o_k^dag o_k)^T (x) I]
struct Liouvillian {
    SparseMatrix matrix;
    HilbertSpec spec;
    // Hint for the direct solver: element (i, j) of rho is expected to scale
    // like s^(e_i + e_j) with e the excitation number. 1 disables rescaling.
    double equilibration_scale = 1.0;
};

struct LiouvillianOptions {
    // Cap on the superoperator dimension D^2.
    Eigen::Index max_dimension = 250'000;
};

Liouvillian build_liouvillian(const ModelParams& p, const HilbertSpec& spec,
                              const LiouvillianOptions& options = {});
Liouvillian build_liouvillian(const QuantumOperator& hamiltonian, const std::vector<Dissipator>& channels,
                              const LiouvillianOptions& options = {});

// max_k |sum_i L(ii, k)|: how far the row-vectorized identity is from being
// a left null vector.
double trace_preservation_residual(const Liouvillian& L);

Vector vectorize(const Matrix& m);
Matrix unvectorize(const Vector& v, Eigen::Index dim);

struct SteadyStateSolution {
    Matrix rho;                   // Hermitized, unit trace
    double residual = 0.0;        // ||L vec(rho)||_2
    double generator_norm = 0.0;  // ||L||_F
    double condition_estimate = 0.0;
};

// Solves L vec(rho) = 0 with the (0,0) equation replaced by tr(rho) = 1,
// after the diagonal similarity rescaling described by equilibration_scale.
// Throws non_unique_steady_state when the constrained system is singular
// and not_converged when the residual bound ||L rho|| <= 1e-10 ||L|| or
// positivity cannot be met.
SteadyStateSolution solve_steady_state_detailed(const Liouvillian& L);
DensityMatrix solve_steady_state(const Liouvillian& L);

// Convenience: validate, build and solve at p.fock_cutoff.
DensityMatrix steady_state(const ModelParams& p, const LiouvillianOptions& options = {});

struct EvolveOptions {
    double t_final = 0.0;     // 0 selects 40 / kappa
    double tolerance = 1e-9;  // per-step absolute and relative error target
    int checkpoints = 40;
};

struct EvolutionResult {
    Matrix rho;
    double time = 0.0;
    long steps = 0;
    std::vector<double> checkpoint_distances; // trace distance between successive checkpoints
};

// Adaptive Dormand-Prince 5(4) integration of d vec(rho)/dt = L vec(rho).
EvolutionResult evolve(const Liouvillian& L, const Matrix& rho0, double t_final,
                       double tolerance = 1e-9, int checkpoints = 1);

// Long-time integration from rho0; throws not_converged when the distance
// between successive checkpoints stops decreasing before it is negligible.
DensityMatrix evolve_to_steady_state(const ModelParams& p, const DensityMatrix& rho0,
                                     const EvolveOptions& options = {});

using Observable = std::function<double(const DensityMatrix& rho, const HilbertSpec& spec)>;

struct TruncationOptions {
    double tol = 1e-3;
    int start_cutoff = 2;
    int max_cutoff = 8;
    LiouvillianOptions liouvillian{};
};

struct TruncationResult {
    double value = 0.0;
    int n_max_used = 0;               // smallest cutoff certified by the next one
    std::vector<double> history;      // observable at start_cutoff, start_cutoff + 1, ...
    Matrix state;                     // steady state at n_max_used
};

// Raises the Fock cutoff from start_cutoff until the observable changes by
// less than tol (relative) between consecutive cutoffs.
TruncationResult converge_truncation(const ModelParams& p, const Observable& observable,
                                     const TruncationOptions& options = {});

} // namespace magblock
