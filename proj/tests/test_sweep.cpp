#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magblock/analytic.hpp"
#include "magblock/config.hpp"
#include "magblock/error.hpp"
#include "magblock/sweep.hpp"

using namespace magblock;

namespace {

SweepSpec theta_sweep(int points, Engines engines)
{
    SweepSpec s;
    s.base = optimal_params(1, 35.0, 0.5, 0.01);
    s.base.fock_cutoff = 2;
    s.axis = Axis::theta;
    s.grid = linear_grid(0.0, 0.02, points);
    s.engines = engines;
    s.truncation.automatic = false;
    return s;
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("axis names round-trip")
{
    for (Axis a : {Axis::delta_over_j, Axis::probe_over_drive, Axis::theta, Axis::drive_rabi, Axis::kappa})
        CHECK(parse_axis(to_string(a)) == a);
    CHECK_THROWS_AS(parse_axis("omega"), Error);
}

TEST_CASE("axis application")
{
    ModelParams base;
    base.coupling = 2.0;
    base.drive_rabi = 0.1;
    base.probe_rabi = 0.3;
    CHECK(apply_axis(base, Axis::delta_over_j, 1.5).detuning == doctest::Approx(3.0));
    CHECK(apply_axis(base, Axis::probe_over_drive, 5.0).probe_rabi == doctest::Approx(0.5));
    const auto d = apply_axis(base, Axis::drive_rabi, 0.02);
    CHECK(d.drive_rabi == 0.02);
    CHECK(d.probe_rabi == doctest::Approx(0.06));
    CHECK(apply_axis(base, Axis::kappa, 0.7).decay == 0.7);
    CHECK(apply_axis(base, Axis::theta, 0.2).phase == 0.2);
}

TEST_CASE("grids")
{
    const auto lin = linear_grid(0.0, 1.0, 5);
    CHECK(lin.size() == 5);
    CHECK(lin[2] == doctest::Approx(0.5));
    CHECK(lin.back() == 1.0);
    const auto geo = geometric_grid(0.005, 0.5, 3);
    CHECK(geo.front() == 0.005);
    CHECK(geo[1] == doctest::Approx(0.05));
    CHECK(geo.back() == 0.5);
    CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), Error);
    CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0), Error);
}

TEST_CASE("sweep spec validation")
{
    auto s = theta_sweep(5, {true, false});
    s.grid = {};
    CHECK_THROWS_AS(run_sweep(s), Error);
    s.grid = {0.0, 0.1, 0.1};
    CHECK_THROWS_AS(run_sweep(s), Error);
    s.grid = {0.2, 0.1, 0.0};
    CHECK_NOTHROW(s.validate());
    s.engines = {false, false};
    CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("one record per grid point with both engines")
{
    const auto records = run_sweep(theta_sweep(50, {true, true}));
    CHECK(records.size() == 50);
    for (const auto& r : records) {
        CHECK(r.error.empty());
        CHECK(r.g2_numeric.has_value());
        CHECK(r.g2_analytic.has_value());
        CHECK(r.n_max == 2);
        CHECK(std::isfinite(safe_log10(*r.g2_numeric)));
    }
    const auto csv = to_csv(records);
    CHECK(csv.rfind(std::string(csv_header) + "\n", 0) == 0);
    CHECK(count_lines(csv) == 51);
}

TEST_CASE("missing engine columns are left empty")
{
    const auto csv = to_csv(run_sweep(theta_sweep(3, {false, true})));
    const auto first_row = csv.substr(csv.find('\n') + 1);
    // axis_value,,,g2_analytic,log10,,,,classification
    CHECK(first_row.find(",,,") != std::string::npos);
}

TEST_CASE("sweeps are deterministic and independent of thread count")
{
    auto s = theta_sweep(24, {true, true});
    const auto serial = to_csv(run_sweep(s));
    CHECK(to_csv(run_sweep(s)) == serial);
    s.threads = 4;
    CHECK(to_csv(run_sweep(s)) == serial);
}

TEST_CASE("per-row failures are recorded without aborting the sweep")
{
    auto s = theta_sweep(3, {true, false});
    s.axis = Axis::drive_rabi;
    s.grid = {0.0, 0.01, 0.02}; // zero drive: g2 undefined
    const auto records = run_sweep(s);
    REQUIRE(records.size() == 3);
    CHECK_FALSE(records[0].error.empty());
    CHECK(records[1].error.empty());
    CHECK(records[2].error.empty());
    CHECK(count_failures(records) == 1);
}

TEST_CASE("log10 is floored to stay finite")
{
    CHECK(std::isfinite(safe_log10(0.0)));
    CHECK(safe_log10(1e-5) == doctest::Approx(-5.0));
}

TEST_CASE("find_minimum on the analytic engine")
{
    SUBCASE("N = 1 optimal phase")
    {
        const auto p = optimal_params(1, 35.0, 0.5, 0.001);
        MinimumSearch s;
        s.lo = 0.0;
        s.hi = 0.03;
        const auto res = find_minimum(p, s);
        CHECK(res.argmin == doctest::Approx(0.009522).epsilon(1e-3));
        CHECK(std::abs(res.argmin - *optimal_conditions(1, 0.5 / 35).theta_exact) <= 1e-4);
    }
    SUBCASE("N = 2 optimal phase")
    {
        const auto p = optimal_params(2, 20.0, 0.5, 0.001);
        MinimumSearch s;
        s.lo = 0.0;
        s.hi = 0.03;
        CHECK(find_minimum(p, s).argmin == doctest::Approx(0.011782).epsilon(1e-3));
    }
    SUBCASE("occupation maximum along the detuning")
    {
        for (int n : {1, 2, 3}) {
            const auto p = optimal_params(n, 10.0, 0.1, 0.001);
            MinimumSearch s;
            s.axis = Axis::delta_over_j;
            s.objective = Objective::maximize_occupation;
            s.lo = 0.2;
            s.hi = 3.0;
            CHECK(find_minimum(p, s).argmin == doctest::Approx(std::sqrt(static_cast<double>(n))).epsilon(1e-3));
        }
    }
    SUBCASE("edge minimum is an error")
    {
        const auto p = optimal_params(1, 35.0, 0.5, 0.001);
        MinimumSearch s;
        s.lo = 0.02;
        s.hi = 0.05;
        try {
            find_minimum(p, s);
            FAIL("expected not_converged");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::not_converged);
        }
    }
}

TEST_CASE("find_minimum on the numeric engine")
{
    auto p = optimal_params(1, 35.0, 0.5, 0.001);
    p.fock_cutoff = 3;
    MinimumSearch s;
    s.engine = Engine::numeric;
    s.lo = 0.0;
    s.hi = 0.03;
    const auto res = find_minimum(p, s);
    const double exact = *optimal_conditions(1, 0.5 / 35).theta_exact;
    CHECK(std::abs(res.argmin - exact) / exact <= 0.1);
    CHECK(res.value < 1e-10);
}

TEST_CASE("presets")
{
    CHECK(preset_names().size() == 6);
    for (const auto& name : preset_names()) {
        const auto pr = make_preset(name);
        CHECK(pr.name == name);
        CHECK_FALSE(pr.curves.empty());
        for (const auto& c : pr.curves) {
            CHECK_NOTHROW(c.spec.validate());
            CHECK(c.spec.engines.numeric);
            CHECK(c.spec.engines.analytic);
        }
    }
    CHECK_THROWS_AS(make_preset("fig8"), Error);

    const auto fig2 = make_preset("fig2");
    CHECK(fig2.curves.size() == 3);
    CHECK(fig2.curves[0].spec.base.coupling == 35.0);
    CHECK(fig2.curves[0].spec.base.decay == 0.5);
    const auto fig3 = make_preset("fig3");
    CHECK(fig3.curves.size() == 4);
    CHECK(fig3.curves[0].spec.grid.front() == 0.005);
    CHECK(fig3.curves[0].spec.grid.back() == 0.5);
    const auto fig4 = make_preset("fig4");
    CHECK(fig4.curves[0].spec.base.n_modes == 2);
    CHECK(fig4.curves[0].spec.base.decay == 1.0);
}

TEST_CASE("config parsing")
{
    RunConfig c;
    c.load_text("# comment\nn_modes = 2\ncoupling=20\ndecay=0.5\ndelta=28.284271247461902\n"
                "drive_rabi=0.001\nprobe_rabi=0.0042426406871192848\nphase=opt\nfock_cutoff=3\n"
                "engine=both\naxis=theta\ngrid_start=0\ngrid_stop=0.02\ngrid_points=5\ngrid_scale=lin\n");
    const auto p = c.params();
    CHECK(p.n_modes == 2);
    CHECK(p.phase == doctest::Approx(*optimal_conditions(2, 0.025).theta_exact));
    CHECK(p.fock_cutoff == 3);
    CHECK_FALSE(c.truncation().automatic);
    CHECK(c.engines().numeric);
    CHECK(c.engines().analytic);
    const auto spec = c.sweep_spec();
    CHECK(spec.grid.size() == 5);
    CHECK(c.get("coupling") == 20.0);

    c.set("fock_cutoff", "auto");
    CHECK(c.truncation().automatic);
    c.set("grid_scale", "log");
    c.set("grid_start", "0.001");
    CHECK(c.grid().front() == 0.001);

    RunConfig bad;
    CHECK_THROWS_AS(bad.set("nonsense", "1"), Error);
    CHECK_THROWS_AS(bad.set("coupling", "abc"), Error);
    CHECK_THROWS_AS(bad.set("grid_scale", "cubic"), Error);
    CHECK_THROWS_AS(bad.set("engine", "magic"), Error);
    CHECK_THROWS_AS(bad.load_text("coupling 20\n"), Error);
    CHECK_THROWS_AS(bad.load_file("/nonexistent/config.txt"), Error);
    try {
        bad.set("coupling", "x");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
    }
}

TEST_CASE("scaling verification with two mode counts")
{
    ScalingOptions opt;
    opt.n_list = {1, 2};
    const auto rep = verify_scaling(opt);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows)
        CHECK(row.error.empty());
    CHECK(rep.rows[1].delta_over_j / rep.rows[0].delta_over_j == doctest::Approx(std::numbers::sqrt2).epsilon(0.02));
    CHECK(rep.rows[1].theta_scaled / rep.rows[0].theta_scaled
          == doctest::Approx(1 / std::numbers::sqrt2).epsilon(0.05));
    REQUIRE(rep.delta_exponent);
    CHECK(*rep.delta_exponent == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("scaling verification reports per-N failures and fits the rest")
{
    ScalingOptions opt;
    opt.n_list = {0, 1, 2};
    const auto rep = verify_scaling(opt);
    CHECK_FALSE(rep.rows[0].error.empty());
    CHECK(rep.rows[1].error.empty());
    CHECK(rep.delta_exponent.has_value());
}
