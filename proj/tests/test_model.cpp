#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magblock/error.hpp"
#include "magblock/model.hpp"

using namespace magblock;

namespace {

ModelParams generic(int n_modes)
{
    ModelParams p;
    p.n_modes = n_modes;
    p.detuning = 1.3;
    p.coupling = 0.7;
    p.probe_rabi = 0.21;
    p.drive_rabi = 0.11;
    p.phase = 0.31;
    p.decay = 0.4;
    p.fock_cutoff = 3;
    return p;
}

std::vector<Eigen::Index> single_excitation(const HilbertSpec& spec)
{
    std::vector<Eigen::Index> idx;
    const auto exc = spec.excitation_numbers();
    for (std::size_t i = 0; i < exc.size(); ++i)
        if (exc[i] == 1)
            idx.push_back(static_cast<Eigen::Index>(i));
    return idx;
}

} // namespace

TEST_CASE("all-zero parameters give the zero Hamiltonian")
{
    ModelParams p;
    p.decay = 0.0;
    p.fock_cutoff = 2;
    const auto h = build_effective_hamiltonian(p, p.hilbert_spec());
    CHECK(h.matrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("effective Hamiltonian is exactly Hermitian")
{
    for (int n : {1, 2, 3}) {
        const auto p = generic(n);
        const auto h = build_effective_hamiltonian(p, p.with_cutoff(2).hilbert_spec());
        CHECK((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Jaynes-Cummings dressed states at Delta = J")
{
    ModelParams p;
    p.detuning = 2.5;
    p.coupling = 2.5;
    p.fock_cutoff = 2;
    const auto spec = p.hilbert_spec();
    const Matrix h = build_effective_hamiltonian(p, spec).matrix();
    const auto idx = single_excitation(spec);
    REQUIRE(idx.size() == 2);
    Matrix blk(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            blk(i, j) = h(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(blk);
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(5.0));
}

TEST_CASE("single-excitation spectrum shows the sqrt(N) bright-state splitting")
{
    for (int n : {1, 2, 3}) {
        ModelParams p;
        p.n_modes = n;
        p.detuning = 0.9;
        p.coupling = 1.7;
        p.fock_cutoff = 1;
        const auto spec = p.hilbert_spec();
        const Matrix h = build_effective_hamiltonian(p, spec).matrix();
        const auto idx = single_excitation(spec);
        REQUIRE(static_cast<int>(idx.size()) == n + 1);
        Matrix blk(idx.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                blk(i, j) = h(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(blk);
        const auto ev = es.eigenvalues();
        const double split = std::sqrt(static_cast<double>(n)) * p.coupling;
        CHECK(ev(0) == doctest::Approx(p.detuning - split));
        CHECK(ev(ev.size() - 1) == doctest::Approx(p.detuning + split));
        // N - 1 dark states stay at Delta.
        for (Eigen::Index k = 1; k + 1 < ev.size(); ++k)
            CHECK(ev(k) == doctest::Approx(p.detuning));
    }
}

TEST_CASE("non-Hermitian Hamiltonian")
{
    auto p = generic(1);
    p.fock_cutoff = 2;
    const auto spec = p.hilbert_spec();
    // |g,1> is index 1, |e,1> is index 3 + 1.
    const Matrix hn = build_nonhermitian_hamiltonian(p, spec).matrix();
    CHECK(hn(1, 1).imag() == doctest::Approx(-p.decay / 2));
    CHECK(hn(4, 4).imag() == doctest::Approx(-p.decay));

    p.decay = 0.0;
    const Matrix h0 = build_nonhermitian_hamiltonian(p, spec).matrix();
    CHECK((h0 - build_effective_hamiltonian(p, spec).matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter and space validation")
{
    auto p = generic(2);
    CHECK_THROWS_AS(build_effective_hamiltonian(p, HilbertSpec{1, 3}), Error);
    p.n_modes = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = generic(1);
    p.decay = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = generic(1);
    p.decay = 0.0;
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(p.require_dissipative(), Error);
}

TEST_CASE("dissipators: one qubit channel plus one per mode, common rate")
{
    for (int n : {1, 2}) {
        const auto p = generic(n);
        const auto spec = p.with_cutoff(2).hilbert_spec();
        const auto d = build_dissipators(p, spec);
        CHECK(static_cast<int>(d.size()) == n + 1);
        for (const auto& ch : d)
            CHECK(ch.rate == p.decay);
    }
}

TEST_CASE("cavity-mediated elimination")
{
    CavityMediatedParams c{{10.0}, {10.0}, {100.0}, {100.0}};
    auto eff = derive_effective_params(c);
    CHECK(eff.couplings[0] == doctest::Approx(1.0));
    CHECK(eff.magnon_shifts[0] == doctest::Approx(1.0));
    CHECK(eff.qubit_shift == doctest::Approx(1.0));
    CHECK(eff.dispersive_valid);

    eff = derive_effective_params({{0.0}, {0.0}, {100.0}, {100.0}});
    CHECK(eff.couplings[0] == 0.0);
    CHECK(eff.magnon_shifts[0] == 0.0);
    CHECK(eff.qubit_shift == 0.0);

    // J = 10 gamma is reachable well inside the dispersive regime.
    eff = derive_effective_params({{100.0, 100.0}, {100.0, 100.0}, {1000.0, 1000.0}, {1000.0, 1000.0}});
    CHECK(eff.couplings[0] == doctest::Approx(10.0));
    CHECK(eff.dispersive_valid);
    ModelParams base;
    base.n_modes = 2;
    const auto p = apply_effective_params(base, eff);
    CHECK(p.coupling == doctest::Approx(10.0));

    // Linear in g_q at fixed g_m, Delta_m.
    const double j1 = derive_effective_params({{3.0}, {7.0}, {50.0}, {50.0}}).couplings[0];
    const double j2 = derive_effective_params({{6.0}, {7.0}, {50.0}, {50.0}}).couplings[0];
    CHECK(j2 == doctest::Approx(2 * j1));

    CHECK_THROWS_AS(derive_effective_params({{1.0}, {1.0}, {0.0}, {1.0}}), Error);
    CHECK_THROWS_AS(derive_effective_params({{1.0}, {1.0}, {10.0}, {0.0}}), Error);
    CHECK_FALSE(derive_effective_params({{10.0}, {10.0}, {20.0}, {20.0}}).dispersive_valid);
}

TEST_CASE("apply_effective_params requires identical modes and maps J < 0 to a phase shift")
{
    ModelParams base;
    base.n_modes = 2;
    const auto uneven = derive_effective_params({{10.0, 12.0}, {10.0, 10.0}, {100.0, 100.0}, {100.0, 100.0}});
    CHECK_THROWS_AS(apply_effective_params(base, uneven), Error);

    base.n_modes = 1;
    base.phase = 0.2;
    const auto negative = derive_effective_params({{10.0}, {10.0}, {-100.0}, {-100.0}});
    const auto p = apply_effective_params(base, negative);
    CHECK(p.coupling == doctest::Approx(1.0));
    CHECK(p.phase == doctest::Approx(0.2 + std::numbers::pi));
}
