#pragma once

// Operators on the truncated space  qubit (x) mode_1 (x) ... (x) mode_N.
// Basis order is fixed: the qubit is subsystem 0 with basis (g, e), modes
// are subsystems 1..N with ascending Fock levels, and the qubit index is the
// most significant digit of the flat index.

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace magblock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Operator acting on a single subsystem (qubit or one truncated mode).
using LocalOperator = Eigen::MatrixXcd;

struct HilbertSpec {
    int n_modes = 1;
    int fock_cutoff = 4; // highest retained Fock level per mode
    static constexpr int qubit_dim = 2;

    int mode_dim() const { return fock_cutoff + 1; }
    int subsystems() const { return n_modes + 1; }
    int local_dim(int site) const;
    Eigen::Index dimension() const;
    std::vector<int> dims() const;

    // Total excitation number (qubit + all quanta) of each basis state.
    std::vector<int> excitation_numbers() const;
    // Fock level of `mode` (1-based) in each basis state.
    std::vector<int> occupation_of(int mode) const;

    void validate() const;

    friend bool operator==(const HilbertSpec&, const HilbertSpec&) = default;
};

namespace site {
inline constexpr int qubit = 0;
inline constexpr int mode(int j) { return j; } // modes are 1-based
} // namespace site

class QuantumOperator {
public:
    QuantumOperator(Matrix matrix, HilbertSpec spec);

    const Matrix& matrix() const { return matrix_; }
    const HilbertSpec& spec() const { return spec_; }
    Eigen::Index dimension() const { return matrix_.rows(); }

    QuantumOperator adjoint() const { return {matrix_.adjoint(), spec_}; }

    friend QuantumOperator operator+(const QuantumOperator& a, const QuantumOperator& b);
    friend QuantumOperator operator-(const QuantumOperator& a, const QuantumOperator& b);
    friend QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b);
    friend QuantumOperator operator*(Complex s, const QuantumOperator& a);

private:
    Matrix matrix_;
    HilbertSpec spec_;
};

QuantumOperator identity(const HilbertSpec& spec);
QuantumOperator zero_operator(const HilbertSpec& spec);

// Density matrix over an arbitrary list of subsystem dimensions. Full states
// carry spec.dims(); reduced states carry the single kept dimension.
class DensityMatrix {
public:
    static constexpr double hermiticity_tol = 1e-10;
    static constexpr double trace_tol = 1e-10;
    static constexpr double positivity_tol = 1e-8;

    // Validating constructor: throws unless the matrix is Hermitian, unit
    // trace and positive within the tolerances above.
    DensityMatrix(Matrix matrix, std::vector<int> dims);

    static DensityMatrix pure(const Vector& psi, std::vector<int> dims);
    static DensityMatrix basis_state(Eigen::Index index, std::vector<int> dims);

    const Matrix& matrix() const { return matrix_; }
    const std::vector<int>& dims() const { return dims_; }
    Eigen::Index dimension() const { return matrix_.rows(); }

    double min_eigenvalue() const;

private:
    Matrix matrix_;
    std::vector<int> dims_;
};

LocalOperator fock_annihilation(int n_max);
LocalOperator qubit_lowering();

QuantumOperator embed(const LocalOperator& op, int site, const HilbertSpec& spec);

DensityMatrix partial_trace(const DensityMatrix& rho, int keep);

// Tensor product of two states; dims are concatenated.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

} // namespace magblock
