#include "magblock/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>
#include <sstream>

#include "magblock/error.hpp"

namespace magblock {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::dimension_overflow: return "dimension overflow";
    case ErrorCode::singular: return "singular";
    case ErrorCode::non_unique_steady_state: return "non-unique steady state";
    case ErrorCode::not_converged: return "not converged";
    case ErrorCode::undefined_correlation: return "undefined correlation";
    case ErrorCode::config: return "config error";
    }
    return "unknown error";
}

int HilbertSpec::local_dim(int s) const
{
    if (s < 0 || s > n_modes) {
        throw Error(ErrorCode::invalid_argument,
                    "subsystem index " + std::to_string(s) + " out of range [0, "
                        + std::to_string(n_modes) + "]");
    }
    return s == site::qubit ? qubit_dim : mode_dim();
}

Eigen::Index HilbertSpec::dimension() const
{
    Eigen::Index d = qubit_dim;
    for (int j = 0; j < n_modes; ++j)
        d *= mode_dim();
    return d;
}

std::vector<int> HilbertSpec::dims() const
{
    std::vector<int> out(static_cast<std::size_t>(n_modes) + 1, mode_dim());
    out[0] = qubit_dim;
    return out;
}

void HilbertSpec::validate() const
{
    if (n_modes < 0)
        throw Error(ErrorCode::invalid_argument, "n_modes must be nonnegative");
    if (fock_cutoff < 0)
        throw Error(ErrorCode::invalid_argument, "fock_cutoff must be nonnegative");
}

namespace {

// Mixed-radix digits of every flat basis index (qubit digit first).
std::vector<std::vector<int>> basis_digits(const HilbertSpec& spec)
{
    const auto dims = spec.dims();
    const auto dim = spec.dimension();
    std::vector<std::vector<int>> digits(static_cast<std::size_t>(dim),
                                         std::vector<int>(dims.size()));
    for (Eigen::Index i = 0; i < dim; ++i) {
        auto rest = i;
        for (std::size_t s = dims.size(); s-- > 0;) {
            digits[i][s] = static_cast<int>(rest % dims[s]);
            rest /= dims[s];
        }
    }
    return digits;
}

} // namespace

std::vector<int> HilbertSpec::excitation_numbers() const
{
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(dimension()));
    for (const auto& d : basis_digits(*this))
        out.push_back(std::accumulate(d.begin(), d.end(), 0));
    return out;
}

std::vector<int> HilbertSpec::occupation_of(int mode) const
{
    if (mode < 1 || mode > n_modes)
        throw Error(ErrorCode::invalid_argument, "mode index must be in [1, n_modes]");
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(dimension()));
    for (const auto& d : basis_digits(*this))
        out.push_back(d[mode]);
    return out;
}

QuantumOperator::QuantumOperator(Matrix matrix, HilbertSpec spec)
    : matrix_(std::move(matrix)), spec_(spec)
{
    const auto dim = spec_.dimension();
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        std::ostringstream os;
        os << "operator is " << matrix_.rows() << "x" << matrix_.cols()
           << " but the Hilbert space has dimension " << dim;
        throw Error(ErrorCode::dimension_mismatch, os.str());
    }
}

namespace {
void require_same_space(const QuantumOperator& a, const QuantumOperator& b)
{
    if (!(a.spec() == b.spec()))
        throw Error(ErrorCode::dimension_mismatch, "operators live on different Hilbert spaces");
}
} // namespace

QuantumOperator operator+(const QuantumOperator& a, const QuantumOperator& b)
{
    require_same_space(a, b);
    return {a.matrix_ + b.matrix_, a.spec_};
}

QuantumOperator operator-(const QuantumOperator& a, const QuantumOperator& b)
{
    require_same_space(a, b);
    return {a.matrix_ - b.matrix_, a.spec_};
}

QuantumOperator operator*(const QuantumOperator& a, const QuantumOperator& b)
{
    require_same_space(a, b);
    return {a.matrix_ * b.matrix_, a.spec_};
}

QuantumOperator operator*(Complex s, const QuantumOperator& a)
{
    return {s * a.matrix_, a.spec_};
}

QuantumOperator identity(const HilbertSpec& spec)
{
    const auto d = spec.dimension();
    return {Matrix::Identity(d, d), spec};
}

QuantumOperator zero_operator(const HilbertSpec& spec)
{
    const auto d = spec.dimension();
    return {Matrix::Zero(d, d), spec};
}

namespace {
Eigen::Index product(const std::vector<int>& dims)
{
    Eigen::Index p = 1;
    for (int d : dims)
        p *= d;
    return p;
}
} // namespace

DensityMatrix::DensityMatrix(Matrix matrix, std::vector<int> dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims))
{
    const auto d = product(dims_);
    if (matrix_.rows() != d || matrix_.cols() != d)
        throw Error(ErrorCode::dimension_mismatch, "density matrix does not match its subsystem dimensions");
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > hermiticity_tol) {
        throw Error(ErrorCode::invalid_argument,
                    "density matrix is not Hermitian (max |rho - rho^dag| = " + std::to_string(herm) + ")");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > trace_tol)
        throw Error(ErrorCode::invalid_argument, "density matrix trace deviates from 1");
    if (const double lo = min_eigenvalue(); lo < -positivity_tol) {
        throw Error(ErrorCode::invalid_argument,
                    "density matrix has negative eigenvalue " + std::to_string(lo));
    }
}

DensityMatrix DensityMatrix::pure(const Vector& psi, std::vector<int> dims)
{
    const double norm = psi.norm();
    if (norm == 0.0)
        throw Error(ErrorCode::invalid_argument, "cannot build a state from the zero vector");
    const Vector v = psi / norm;
    return {v * v.adjoint(), std::move(dims)};
}

DensityMatrix DensityMatrix::basis_state(Eigen::Index index, std::vector<int> dims)
{
    const auto d = product(dims);
    if (index < 0 || index >= d)
        throw Error(ErrorCode::invalid_argument, "basis index out of range");
    Matrix m = Matrix::Zero(d, d);
    m(index, index) = 1.0;
    return {std::move(m), std::move(dims)};
}

double DensityMatrix::min_eigenvalue() const
{
    // Hermitian part only; the anti-Hermitian residue is bounded by the
    // constructor check.
    const Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

LocalOperator fock_annihilation(int n_max)
{
    if (n_max < 1)
        throw Error(ErrorCode::invalid_argument, "fock_annihilation: no excitation sector (n_max must be >= 1)");
    LocalOperator a = LocalOperator::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

LocalOperator qubit_lowering()
{
    // basis (g, e): sigma_- |e> = |g>
    LocalOperator s = LocalOperator::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

QuantumOperator embed(const LocalOperator& op, int s, const HilbertSpec& spec)
{
    const int d = spec.local_dim(s);
    if (op.rows() != d || op.cols() != d) {
        std::ostringstream os;
        os << "embed: operator is " << op.rows() << "x" << op.cols() << " but subsystem " << s
           << " has local dimension " << d;
        throw Error(ErrorCode::dimension_mismatch, os.str());
    }
    const auto dims = spec.dims();
    Eigen::Index left = 1, right = 1;
    for (int k = 0; k < s; ++k)
        left *= dims[k];
    for (std::size_t k = static_cast<std::size_t>(s) + 1; k < dims.size(); ++k)
        right *= dims[k];

    const auto dim = spec.dimension();
    Matrix out = Matrix::Zero(dim, dim);
    for (Eigen::Index l = 0; l < left; ++l)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const Complex v = op(a, b);
                if (v == Complex{})
                    continue;
                for (Eigen::Index r = 0; r < right; ++r)
                    out((l * d + a) * right + r, (l * d + b) * right + r) = v;
            }
    return {std::move(out), spec};
}

DensityMatrix partial_trace(const DensityMatrix& rho, int keep)
{
    const auto& dims = rho.dims();
    if (keep < 0 || static_cast<std::size_t>(keep) >= dims.size())
        throw Error(ErrorCode::invalid_argument, "partial_trace: invalid subsystem index " + std::to_string(keep));
    Eigen::Index left = 1, right = 1;
    for (int k = 0; k < keep; ++k)
        left *= dims[k];
    for (std::size_t k = static_cast<std::size_t>(keep) + 1; k < dims.size(); ++k)
        right *= dims[k];
    const int d = dims[keep];

    const Matrix& m = rho.matrix();
    Matrix out = Matrix::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            Complex acc{};
            for (Eigen::Index l = 0; l < left; ++l)
                for (Eigen::Index r = 0; r < right; ++r)
                    acc += m((l * d + a) * right + r, (l * d + b) * right + r);
            out(a, b) = acc;
        }
    // Summation order can leave a last-ulp anti-Hermitian residue.
    Matrix herm = 0.5 * (out + out.adjoint());
    return {std::move(herm), {d}};
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b)
{
    const auto& ma = a.matrix();
    const auto& mb = b.matrix();
    const auto nb = mb.rows();
    Matrix out(ma.rows() * nb, ma.cols() * nb);
    for (Eigen::Index i = 0; i < ma.rows(); ++i)
        for (Eigen::Index j = 0; j < ma.cols(); ++j)
            out.block(i * nb, j * nb, nb, nb) = ma(i, j) * mb;
    auto dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    return {std::move(out), std::move(dims)};
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b)
{
    if (a.dims() != b.dims())
        throw Error(ErrorCode::dimension_mismatch, "trace_distance: states live on different spaces");
    const Matrix diff = a.matrix() - b.matrix();
    const Matrix herm = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace magblock
