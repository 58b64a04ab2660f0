#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lagdeform/dynamics.hpp"
#include "lagdeform/errors.hpp"
#include "lagdeform/problem.hpp"
#include "support/oracle.hpp"

using namespace lagdeform;

namespace {

double oscillator_error(double h)
{
    const auto S = oracle::spray(1, {"x1"});
    const auto t = integrate_geodesic(S, {h, 1.0, PhasePoint{{1.0}, {0.0}}, {}});
    return std::abs(t.states.back().x[0] - std::cos(std::sqrt(2.0)));
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("flat spray moves on straight lines")
{
    const auto S = oracle::spray(3, {"0", "0", "0"});
    const auto t = integrate_geodesic(S, {1e-3, 1.0, PhasePoint{{0, 0, 0}, {1, 2, 3}}, {}});
    CHECK(t.states.size() == 1001);
    CHECK(t.times.back() == doctest::Approx(1.0));
    CHECK_FALSE(t.truncated);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(t.states.back().x[i] - (i + 1.0)) <= 1e-12);

    const DeformedLagrangian kin(oracle::field(3, "(y1^2 + y2^2 + y3^2)/2"));
    CHECK(el_residual_along(t, kin) <= 1e-10);
    CHECK(energy_along(t, kin).drift <= 1e-12);
}

TEST_CASE("oscillator against cos(sqrt(2) t)")
{
    CHECK(oscillator_error(1e-3) <= 1e-8);
    const auto S = oracle::spray(1, {"x1"});
    const auto t = integrate_geodesic(S, {1e-3, 1.0, PhasePoint{{1.0}, {0.0}}, {}});
    CHECK(t.states.back().x[0] == doctest::Approx(0.1559).epsilon(1e-3));
}

TEST_CASE("fourth-order convergence")
{
    const double e1 = oscillator_error(0.02);
    const double e2 = oscillator_error(0.01);
    CHECK(e1 / e2 >= 14.0);

    // against a fine reference on a nonlinear problem
    const auto S = oracle::spray(2, {"sin(x2)*y1/4", "x1*y2^2/8 + x2"});
    const PhasePoint p0{{0.2, -0.3}, {0.5, 0.4}};
    const auto ref = integrate_geodesic(S, {1e-4, 1.0, p0, {}}).states.back();
    auto err = [&](double h) {
        const auto s = integrate_geodesic(S, {h, 1.0, p0, {}}).states.back();
        double m = 0;
        for (std::size_t i = 0; i < 2; ++i) m = std::max({m, std::abs(s.x[i] - ref.x[i]), std::abs(s.y[i] - ref.y[i])});
        return m;
    };
    CHECK(err(0.04) / err(0.02) >= 14.0);
}

TEST_CASE("configuration and domain errors")
{
    const auto S = oracle::spray(1, {"x1"});
    CHECK_THROWS_AS(integrate_geodesic(S, {0.3, 1.0, PhasePoint{{1.0}, {0.0}}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(integrate_geodesic(S, {0.1, 1.0, PhasePoint{{1.0, 2.0}, {0.0, 0.0}}, {}}), DimensionMismatch);

    const auto bad = oracle::spray(1, {"ln(x1)"});
    try {
        integrate_geodesic(bad, {1e-3, 1.0, PhasePoint{{0.02}, {-1.0}}, {}});
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.step() > 1);
        CHECK(e.step() < 100);
    }
}

TEST_CASE("leaving the box truncates with a warning")
{
    const auto S = oracle::spray(1, {"0"});
    IntegratorConfig cfg{1e-2, 1.0, PhasePoint{{0.0}, {1.0}}, {{"x1", {-1.0, 0.505}}, {"y1", {0.0, 2.0}}}};
    const auto t = integrate_geodesic(S, cfg);
    CHECK(t.truncated);
    REQUIRE(t.warnings.size() == 1);
    CHECK(t.states.back().x[0] <= 0.505);
    CHECK(t.states.size() == 51);
}

TEST_CASE("Euler-Lagrange residual along trajectories")
{
    const auto lien = load_problem(oracle::corpus("lienard.json"));
    const PhasePoint p0{{1.0}, {1.0}};
    const auto t = integrate_geodesic(lien.spray, {1e-3, 1.0, p0, {}});
    const auto phi = synthesize(PowerShiftFamily{0.5, 0}, {1e-6, 1e6});
    // momenta reach O(100) here, so measure against their size and check the O(h^2) rate
    const DeformedLagrangian deformed(lien.lagrangian, phi);
    double scale = 0;
    for (const auto& s : t.states) scale = std::max(scale, std::abs(deformed.eval(s).dy[0]));
    const double r1 = el_residual_along(t, deformed);
    CHECK(r1 / scale <= 1e-5);
    const double r2 = el_residual_along(integrate_geodesic(lien.spray, {2e-3, 1.0, p0, {}}), deformed);
    CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(0.05));
    // the raw Lagrangian carries the force 2(-2x - y) along the flow
    CHECK(el_residual_along(t, DeformedLagrangian(lien.lagrangian)) > 1e-3);

    const auto diss = load_problem(oracle::corpus("dissipative.json"));
    const auto td = integrate_geodesic(diss.spray, {1e-3, 1.0, PhasePoint{{1, 1}, {1, 1}}, {}});
    CHECK(el_residual_along(td, DeformedLagrangian(diss.lagrangian)) > 1e-3);

    Trajectory tiny = t;
    tiny.states.resize(3);
    tiny.times.resize(3);
    CHECK_THROWS_AS(el_residual_along(tiny, DeformedLagrangian(lien.lagrangian)), TooShort);
}

TEST_CASE("energy along trajectories")
{
    const auto lien = load_problem(oracle::corpus("lienard.json"));
    const auto t = integrate_geodesic(lien.spray, {1e-3, 1.0, PhasePoint{{1.0}, {1.0}}, {}});
    const auto phi = synthesize(PowerShiftFamily{0.5, 0}, {1e-6, 1e6});
    CHECK(energy_along(t, DeformedLagrangian(lien.lagrangian, phi)).drift <= 1e-8);
    CHECK(energy_along(t, DeformedLagrangian(lien.lagrangian)).drift > 1e-3);

    // raw energy change equals the time integral of S(E_L)
    const auto diss = load_problem(oracle::corpus("dissipative.json"));
    const auto td = integrate_geodesic(diss.spray, {1e-3, 1.0, PhasePoint{{1, 1}, {1, 1}}, {}});
    const auto E = energy_along(td, DeformedLagrangian(diss.lagrangian));
    const auto D = dissipation_along(td, diss.spray, diss.lagrangian, *diss.dissipation);
    double integral = 0;
    for (std::size_t k = 1; k < D.S_energy.size(); ++k) integral += 0.5 * td.h * (D.S_energy[k - 1] + D.S_energy[k]);
    CHECK(E.values.back() - E.values.front() == doctest::Approx(integral).epsilon(1e-6));
    CHECK(E.drift > 0);
}

TEST_CASE("dissipation along trajectories")
{
    const auto diss = load_problem(oracle::corpus("dissipative.json"));
    const auto td = integrate_geodesic(diss.spray, {1e-3, 1.0, PhasePoint{{1, 1}, {1, 1}}, {}});
    const auto D = dissipation_along(td, diss.spray, diss.lagrangian, *diss.dissipation);
    CHECK(D.balance <= 1e-10);
    CHECK_FALSE(D.rayleigh);
    CHECK_FALSE(D.rayleigh_balance);
    CHECK(D.S_energy.size() == td.states.size());

    const auto flat = oracle::spray(2, {"0", "0"});
    const auto kin = oracle::field(2, "(y1^2 + y2^2)/2");
    const auto tf = integrate_geodesic(flat, {1e-2, 1.0, PhasePoint{{0, 0}, {1, 1}}, {}});
    const auto Z = dissipation_along(tf, flat, kin, {2, Expression(0.0)});
    for (std::size_t k = 0; k < Z.S_energy.size(); ++k) {
        CHECK(Z.S_energy[k] == 0.0);
        CHECK(Z.C_of_D[k] == 0.0);
        CHECK(Z.twice_D[k] == 0.0);
    }

    const auto fr = oracle::spray(2, {"y1/2", "y2/2"});
    const auto tr = integrate_geodesic(fr, {1e-3, 1.0, PhasePoint{{0, 0}, {1, -0.5}}, {}});
    const auto R = dissipation_along(tr, fr, kin, oracle::field(2, "-(y1^2 + y2^2)/2"));
    CHECK(R.rayleigh);
    REQUIRE(R.rayleigh_balance);
    CHECK(*R.rayleigh_balance <= 1e-12);
    CHECK(R.negative);
    CHECK(energy_along(tr, DeformedLagrangian(kin)).strictly_decreasing);
}

TEST_CASE("trajectory CSV export")
{
    const auto lien = load_problem(oracle::corpus("lienard.json"));
    const auto t = integrate_geodesic(lien.spray, {0.25, 1.0, PhasePoint{{1.0}, {1.0}}, {}});
    const auto phi = synthesize(PowerShiftFamily{0.5, 0}, {1e-6, 1e6});
    std::ostringstream out;
    write_trajectory_csv(out, t, DeformedLagrangian(lien.lagrangian), DeformedLagrangian(lien.lagrangian, phi));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x1,y1,E_L,E_PhiL");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 4);
        ++rows;
    }
    CHECK(rows == 5);
}

}
