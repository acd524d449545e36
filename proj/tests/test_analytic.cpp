#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "magblock/analytic.hpp"
#include "magblock/error.hpp"
#include "magblock/sweep.hpp"
#include "oracle.hpp"

using namespace magblock;
using std::numbers::sqrt2;

namespace {

ModelParams random_draw(std::mt19937& rng, int n_modes)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p;
    p.n_modes = n_modes;
    p.coupling = 1.0 + 30.0 * u(rng);
    p.decay = 0.1 + 1.4 * u(rng);
    p.detuning = (u(rng) - 0.5) * 4.0 * p.coupling;
    p.drive_rabi = 1e-3 * (0.1 + u(rng));
    p.probe_rabi = 1e-2 * u(rng);
    p.phase = 2 * std::numbers::pi * u(rng);
    return p;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace

TEST_CASE("undriven amplitudes vanish")
{
    ModelParams p;
    p.n_modes = 3;
    p.coupling = 2.0;
    p.detuning = 1.0;
    const auto a = amplitudes_general_n(p);
    CHECK(a.c_e0 == Complex{});
    CHECK(a.c_g1 == Complex{});
    CHECK(a.c_e1 == Complex{});
    CHECK(a.c_g2 == Complex{});
    CHECK_THROWS_AS(g2_analytic(a), Error);
}

TEST_CASE("A vanishes at the optimal detuning and ratio without decay")
{
    for (int n = 1; n <= 5; ++n) {
        ModelParams p;
        p.n_modes = n;
        p.coupling = 7.0;
        p.decay = 0.0;
        p.detuning = std::sqrt(static_cast<double>(n)) * p.coupling;
        p.drive_rabi = 0.3;
        p.probe_rabi = 3 * std::sqrt(static_cast<double>(n)) * p.drive_rabi;
        const auto in = analytic_intermediates(p);
        CAPTURE(n);
        CHECK(std::abs(in.a_general) <= 1e-12 * p.coupling * p.probe_rabi);
    }
}

TEST_CASE("closed-form A at the N = 1 and N = 2 optima")
{
    ModelParams p;
    p.coupling = 5.0;
    p.decay = 0.0;
    p.drive_rabi = 0.2;

    p.detuning = p.coupling;
    p.probe_rabi = 3 * p.drive_rabi;
    CHECK(std::abs(analytic_intermediates(p).a_closed) <= 1e-12);

    p.n_modes = 2;
    p.detuning = sqrt2 * p.coupling;
    p.probe_rabi = 3 * sqrt2 * p.drive_rabi;
    const double a = analytic_intermediates(p).a_closed;
    CHECK(std::abs(a + 2 * p.coupling * p.coupling * p.drive_rabi * p.drive_rabi) <= 1e-12);
}

TEST_CASE("N = 1 closed forms agree with the independent hierarchy solve")
{
    std::mt19937 rng(11);
    for (int draw = 0; draw < 10; ++draw) {
        const auto p = random_draw(rng, 1);
        const auto n1 = amplitudes_n1(p);
        const auto gen = amplitudes_general_n(p);
        const auto ref = oracle::weak_drive(p);
        CAPTURE(draw);
        CHECK(rel(n1.p_g1, std::norm(ref.c_g1)) < 1e-9);
        CHECK(rel(n1.p_g2, std::norm(ref.c_g2)) < 1e-9);
        CHECK(rel(gen.p_g1, n1.p_g1) < 1e-9);
        CHECK(rel(gen.p_g2, n1.p_g2) < 1e-9);
        CHECK(std::abs(n1.c_g2 - ref.c_g2) <= 1e-9 * std::abs(ref.c_g2));
        CHECK(rel(g2_analytic(n1).exact, ref.g2) < 1e-6);
    }
}

TEST_CASE("N = 2 closed forms agree with the independent hierarchy solve")
{
    std::mt19937 rng(12);
    for (int draw = 0; draw < 10; ++draw) {
        const auto p = random_draw(rng, 2);
        const auto n2 = amplitudes_n2(p);
        const auto gen = amplitudes_general_n(p);
        const auto ref = oracle::weak_drive(p);
        CAPTURE(draw);
        CHECK(rel(n2.p_g1, std::norm(ref.c_g1)) < 1e-9);
        CHECK(rel(n2.p_g2, std::norm(ref.c_g2)) < 1e-9);
        CHECK(rel(gen.p_g1, n2.p_g1) < 1e-9);
        CHECK(std::abs(n2.c_g1 - gen.c_g1) <= 1e-12 * std::abs(gen.c_g1));
        CHECK(rel(g2_analytic(n2).exact, ref.g2) < 1e-6);
    }
}

TEST_CASE("weak-drive hierarchy holds when the regime flag is set")
{
    std::mt19937 rng(13);
    for (int n : {1, 2, 3}) {
        for (int draw = 0; draw < 10; ++draw) {
            const auto a = amplitudes(random_draw(rng, n));
            if (!a.weak_drive_certified)
                continue;
            CHECK(std::abs(a.c_g1) > 5 * std::abs(a.c_e1));
            CHECK(std::abs(a.c_g1) > 5 * std::abs(a.c_g2));
            if (n > 1)
                CHECK(std::abs(a.c_g1) > 5 * std::abs(a.c_g11));
        }
    }
}

TEST_CASE("zero pair amplitude gives g2 = 0")
{
    AmplitudeSet a;
    a.c_g1 = 0.01;
    a.p_g1 = 1e-4;
    CHECK(g2_analytic(a).exact == 0.0);
    CHECK(g2_analytic(a).approx == 0.0);
}

TEST_CASE("small-phase expansions track the exact closed forms")
{
    const double j = 35.0, k = j / 70.0;
    auto p = optimal_params(1, j, k, 0.001);
    p.phase = 0.005;
    const auto exact = amplitudes_n1(p);
    const auto small = amplitudes_n1(p, true);
    CHECK(rel(small.p_g1, exact.p_g1) <= 0.02);
    CHECK(rel(small.p_g2, exact.p_g2) <= 0.02);
    CHECK(rel(g2_analytic(small).approx, g2_analytic(exact).approx) <= 0.02);

    auto q = optimal_params(2, 20.0, 0.5, 0.001);
    q.phase = 0.005;
    const auto exact2 = amplitudes_n2(q);
    const auto small2 = amplitudes_n2(q, true);
    CHECK(rel(small2.p_g1, exact2.p_g1) <= 0.02);
    CHECK(rel(small2.p_g2, exact2.p_g2) <= 0.02);
}

TEST_CASE("weak-drive analytic g2 at theta = 0 is close to the master equation scale")
{
    // Half an order of magnitude between the pure-state model and the full solve.
    auto p = optimal_params(1, 35.0, 0.5, 0.001);
    p.phase = 0.0;
    p.fock_cutoff = 3;
    const double analytic = std::log10(g2_analytic(amplitudes_n1(p)).exact);
    TruncationPolicy fixed;
    fixed.automatic = false;
    const double numeric = std::log10(numeric_metrics(p, fixed).g2_zero);
    CHECK(std::abs(analytic - numeric) <= 0.5);
}

TEST_CASE("optimal conditions")
{
    auto c = optimal_conditions(1, 1.0 / 70.0);
    CHECK(c.delta_over_j == 1.0);
    CHECK(c.probe_over_drive == 3.0);
    REQUIRE(c.theta_exact);
    CHECK(*c.theta_exact == doctest::Approx(0.009522).epsilon(1e-4));
    CHECK(*c.theta_exact / std::numbers::pi == doctest::Approx(0.00303).epsilon(1e-3));

    c = optimal_conditions(2, 0.025);
    CHECK(c.delta_over_j == doctest::Approx(sqrt2));
    CHECK(c.probe_over_drive == doctest::Approx(3 * sqrt2));
    REQUIRE(c.theta_exact);
    CHECK(*c.theta_exact == doctest::Approx(0.011782).epsilon(1e-4));
    CHECK(*c.theta_exact / std::numbers::pi == doctest::Approx(0.00375).epsilon(1e-3));

    c = optimal_conditions(4, 0.01);
    CHECK(c.delta_over_j == 2.0);
    CHECK(c.probe_over_drive == 6.0);
    CHECK_FALSE(c.theta_exact);
    CHECK(c.theta_general == doctest::Approx(0.01 / 3));

    CHECK_THROWS_AS(optimal_conditions(0, 0.1), Error);
    CHECK_THROWS_AS(optimal_conditions(1, 0.0), Error);
}

TEST_CASE("exact optimal phase approaches the general form for small r")
{
    for (int n : {1, 2})
        for (double r : {1e-4, 1e-3, 0.005, 0.01}) {
            const auto c = optimal_conditions(n, r);
            CHECK(std::abs(*c.theta_exact - c.theta_general) / *c.theta_exact <= 0.01);
        }
}

TEST_CASE("occupation is maximal at Delta = sqrt(N) J")
{
    for (int n : {1, 2, 3}) {
        for (double r : {0.005, 0.05}) {
            const double j = 10.0;
            auto p = optimal_params(n, j, r * j, 0.001);
            const double sn = std::sqrt(static_cast<double>(n));
            const int points = 3001;
            const double step = 3 * sn / (points - 1);
            double best = -1.0, arg = 0.0;
            for (int i = 0; i < points; ++i) {
                p.detuning = i * step * j;
                const double v = amplitudes_general_n(p).p_g1;
                if (v > best) {
                    best = v;
                    arg = i * step;
                }
            }
            CAPTURE(n);
            CAPTURE(r);
            CHECK(std::abs(arg - sn) <= 1.5 * step);
        }
    }
}

TEST_CASE("numerical argmin over theta reproduces the exact optimal phase")
{
    for (double r : {0.005, 1.0 / 70.0, 0.05}) {
        const auto p = optimal_params(1, 35.0, 35.0 * r, 0.001);
        MinimumSearch s;
        s.axis = Axis::theta;
        s.lo = 0.0;
        s.hi = 2 * r;
        const auto res = find_minimum(p, s);
        CAPTURE(r);
        CHECK(std::abs(res.argmin - *optimal_conditions(1, r).theta_exact) <= 1e-4);
    }
    const auto q = optimal_params(2, 20.0, 0.5, 0.001);
    MinimumSearch s;
    s.axis = Axis::theta;
    s.lo = 0.0;
    s.hi = 0.05;
    CHECK(std::abs(find_minimum(q, s).argmin - *optimal_conditions(2, 0.025).theta_exact) <= 1e-4);
}

TEST_CASE("analytic argmin also agrees with a brute-force scan of the independent hierarchy")
{
    auto p = optimal_params(1, 35.0, 0.5, 0.001);
    double best = 1e300, arg = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        p.phase = 0.02 * i / 4000;
        const double g = oracle::weak_drive(p).g2;
        if (g < best) {
            best = g;
            arg = p.phase;
        }
    }
    CHECK(std::abs(arg - *optimal_conditions(1, 0.5 / 35.0).theta_exact) <= 1e-4);
}

TEST_CASE("resonant denominators are reported")
{
    ModelParams p;
    p.coupling = 1.0;
    p.decay = 0.0;
    p.detuning = 1.0;
    p.drive_rabi = 0.1;
    CHECK_THROWS_AS(amplitudes_general_n(p), Error);
    CHECK_THROWS_AS(amplitudes_n1(p), Error);
    p.n_modes = 2;
    CHECK_THROWS_AS(amplitudes_n1(p), Error);
}
