#include "magblock/observables.hpp"

#include <cmath>

#include "magblock/error.hpp"

namespace magblock {

std::string_view to_string(Statistics s) noexcept
{
    switch (s) {
    case Statistics::bunching: return "bunching";
    case Statistics::poissonian: return "poissonian";
    case Statistics::antibunching: return "antibunching";
    }
    return "unknown";
}

namespace {

struct ModeView {
    Eigen::Index left = 1;  // product of dims before the mode
    Eigen::Index right = 1; // product of dims after the mode
    int dim = 0;
};

ModeView view(const DensityMatrix& rho, int mode)
{
    const auto& dims = rho.dims();
    if (dims.size() < 2 || dims[0] != HilbertSpec::qubit_dim)
        throw Error(ErrorCode::invalid_argument, "expected a full qubit + modes state");
    if (mode < 1 || static_cast<std::size_t>(mode) >= dims.size())
        throw Error(ErrorCode::invalid_argument, "mode index " + std::to_string(mode) + " out of range");
    ModeView v;
    v.dim = dims[mode];
    for (int k = 0; k < mode; ++k)
        v.left *= dims[k];
    for (std::size_t k = static_cast<std::size_t>(mode) + 1; k < dims.size(); ++k)
        v.right *= dims[k];
    return v;
}

// sum_i w(n_mode(i)) rho_ii, i.e. tr(f(m^dag m) rho) for a diagonal weight.
template <class Weight>
double diagonal_moment(const DensityMatrix& rho, int mode, Weight w)
{
    const auto v = view(rho, mode);
    const Matrix& m = rho.matrix();
    double acc = 0.0;
    for (Eigen::Index l = 0; l < v.left; ++l)
        for (int n = 0; n < v.dim; ++n) {
            const double weight = w(n);
            if (weight == 0.0)
                continue;
            for (Eigen::Index r = 0; r < v.right; ++r) {
                const auto i = (l * v.dim + n) * v.right + r;
                acc += weight * m(i, i).real();
            }
        }
    return acc;
}

} // namespace

double occupation(const DensityMatrix& rho, int mode)
{
    return diagonal_moment(rho, mode, [](int n) { return static_cast<double>(n); });
}

double g2_zero_delay(const DensityMatrix& rho, int mode)
{
    const double n = occupation(rho, mode);
    if (!(n > occupation_floor)) {
        throw Error(ErrorCode::undefined_correlation,
                    "g2(0) undefined: mode occupation " + std::to_string(n) + " is below the floor");
    }
    const double pairs = diagonal_moment(rho, mode, [](int k) { return static_cast<double>(k) * (k - 1); });
    return std::max(pairs, 0.0) / (n * n);
}

double single_excitation_probability(const DensityMatrix& rho, int mode)
{
    return diagonal_moment(rho, mode, [](int n) { return n == 1 ? 1.0 : 0.0; });
}

Statistics classify_statistics(double g2, double band)
{
    if (!(g2 >= 0.0))
        throw Error(ErrorCode::invalid_argument, "classify_statistics: g2 must be >= 0");
    if (g2 > 1.0 + band)
        return Statistics::bunching;
    if (g2 >= 1.0 - band)
        return Statistics::poissonian;
    return Statistics::antibunching;
}

BlockadeMetrics blockade_metrics(const DensityMatrix& rho, int mode, int n_max)
{
    BlockadeMetrics m;
    m.occupation = occupation(rho, mode);
    m.p1 = single_excitation_probability(rho, mode);
    m.g2_zero = g2_zero_delay(rho, mode);
    m.classification = classify_statistics(m.g2_zero);
    m.n_max = n_max;
    return m;
}

} // namespace magblock
