#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "lagdeform/classify.hpp"
#include "lagdeform/problem.hpp"
#include "support/oracle.hpp"

using namespace lagdeform;

namespace {

std::vector<CloudPoint> cloud(const std::function<double(double)>& f, double lo = 1.0, double hi = 4.0,
                              std::size_t m = 200, double noise = 1e-12)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-noise, noise);
    std::vector<CloudPoint> out;
    for (std::size_t k = 0; k < m; ++k) {
        const double L = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(m - 1);
        out.push_back({L, f(L) + u(rng)});
    }
    return out;
}

} // namespace

TEST_SUITE("classify") {

TEST_CASE("root family: f = -1/(2L)")
{
    const auto fit = classify(cloud([](double L) { return -1 / (2 * L); }));
    const auto* ps = std::get_if<PowerShiftFamily>(&fit.chosen);
    REQUIRE(ps);
    CHECK(std::abs(ps->gamma + 0.5) <= 1e-6);
    CHECK(std::abs(ps->a) <= 1e-6);
    REQUIRE(fit.homogeneous_root);
    CHECK(fit.homogeneous_root->p == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(describe(fit.chosen) == "PowerShift(gamma=-0.5, a=0)");
    CHECK(fit.candidates.size() == 4);
}

TEST_CASE("constant family beats its two-parameter relatives")
{
    const auto fit = classify(cloud([](double) { return 3.0; }));
    const auto* c = std::get_if<ConstantFamily>(&fit.chosen);
    REQUIRE(c);
    CHECK(std::abs(c->gamma - 3.0) <= 1e-6);
    CHECK_FALSE(fit.homogeneous_root);

    const auto zero = classify(cloud([](double) { return 0.0; }));
    REQUIRE(std::holds_alternative<ConstantFamily>(zero.chosen));
    CHECK(std::abs(std::get<ConstantFamily>(zero.chosen).gamma) <= 1e-6);
}

TEST_CASE("power-shift family")
{
    const auto fit = classify(cloud([](double L) { return 0.7 / (L + 0.3); }));
    const auto* ps = std::get_if<PowerShiftFamily>(&fit.chosen);
    REQUIRE(ps);
    CHECK(std::abs(ps->gamma - 0.7) <= 1e-6);
    CHECK(std::abs(ps->a - 0.3) <= 1e-6);
    CHECK_FALSE(fit.homogeneous_root);

    const auto neg = classify(cloud([](double L) { return -1.5 / (L - 0.5); }, 1.0, 3.0));
    const auto* pn = std::get_if<PowerShiftFamily>(&neg.chosen);
    REQUIRE(pn);
    CHECK(std::abs(pn->gamma + 1.5) <= 1e-6);
    CHECK(std::abs(pn->a + 0.5) <= 1e-6);
}

TEST_CASE("logarithmic family")
{
    const auto fit = classify(cloud([](double L) { return -1 / (L + 0.5); }));
    const auto* lg = std::get_if<LogarithmicFamily>(&fit.chosen);
    REQUIRE(lg);
    CHECK(std::abs(lg->a - 0.5) <= 1e-6);

    const auto at0 = classify(cloud([](double L) { return -1 / L; }));
    REQUIRE(std::holds_alternative<LogarithmicFamily>(at0.chosen));
    CHECK(std::abs(std::get<LogarithmicFamily>(at0.chosen).a) <= 1e-6);
}

TEST_CASE("Moebius family, normalized")
{
    const auto fit = classify(cloud([](double L) { return -2.0 / (L + 2.0); }));
    const auto* m = std::get_if<MoebiusFamily>(&fit.chosen);
    REQUIRE(m);
    CHECK(std::abs(m->c - 0.5) <= 1e-6);
    CHECK(std::abs(m->d - 1.0) <= 1e-6);
    CHECK(m->d / m->c == doctest::Approx(2.0).epsilon(1e-6));

    // negative side of the pole
    const auto left = classify(cloud([](double L) { return -2.0 / (L - 5.0); }));
    const auto* ml = std::get_if<MoebiusFamily>(&left.chosen);
    REQUIRE(ml);
    CHECK(std::abs(ml->c - 0.2) <= 1e-6);
    CHECK(std::abs(ml->d + 1.0) <= 1e-6);
}

TEST_CASE("Moebius normalization is scale invariant")
{
    for (double lambda : {0.01, 0.5, 3.0, -7.0}) {
        const double c = lambda * 1.0, d = lambda * 2.0;
        const auto n = normalize({c, d});
        CHECK(n.c >= 0);
        CHECK(std::max(std::abs(n.c), std::abs(n.d)) == doctest::Approx(1.0));
        CHECK(n.c == doctest::Approx(0.5));
        CHECK(n.d == doctest::Approx(1.0));
        const auto fit = classify(cloud([&](double L) { return -2 * c / (c * L + d); }));
        const auto* m = std::get_if<MoebiusFamily>(&fit.chosen);
        REQUIRE(m);
        CHECK(std::abs(m->c - 0.5) <= 1e-6);
        CHECK(std::abs(m->d - 1.0) <= 1e-6);
    }
}

TEST_CASE("generating functions match the family formulas")
{
    CHECK(generating_function(ConstantFamily{2.0}, 7.0) == 2.0);
    CHECK(generating_function(PowerShiftFamily{0.5, 1.0}, 1.0) == 0.25);
    CHECK(generating_function(LogarithmicFamily{1.0}, 1.0) == -0.5);
    CHECK(generating_function(MoebiusFamily{1.0, 2.0}, 2.0) == -0.5);
    CHECK(generating_function(HomogeneousRootFamily{2.0}, 4.0) == -0.125);
    CHECK(family_name(MoebiusFamily{}) == "Moebius");
}

TEST_CASE("fallback to a tabulated class")
{
    const auto data = cloud([](double L) { return std::sin(3 * L); });
    const auto fit = classify(data);
    const auto* t = std::get_if<TabulatedFamily>(&fit.chosen);
    REQUIRE(t);
    CHECK(t->points.size() == data.size());
    CHECK(generating_function(fit.chosen, 2.0) == doctest::Approx(std::sin(6.0)).epsilon(1e-3));
    for (const auto& c : fit.candidates) CHECK(c.residual > kFitTolerance);
}

TEST_CASE("chosen class minimizes the penalized residual")
{
    for (auto f : std::vector<std::function<double(double)>>{[](double L) { return -1 / (2 * L); },
                                                            [](double) { return -0.3; },
                                                            [](double L) { return -1 / (L + 1); },
                                                            [](double L) { return -2 / (L + 3); }}) {
        const auto fit = classify(cloud(f));
        double best = INFINITY;
        for (const auto& c : fit.candidates)
            if (c.valid) best = std::min(best, c.penalized);
        bool found = false;
        for (const auto& c : fit.candidates)
            if (c.valid && c.penalized == best) {
                CHECK(family_name(c.params) == family_name(fit.chosen));
                found = true;
                break;
            }
        CHECK(found);
        CHECK(fit.residual <= kFitTolerance);
        CHECK(fit.residual == doctest::Approx(fit_residual(fit.chosen, cloud(f))).epsilon(1e-9));
    }
}

TEST_CASE("corpus clouds classify as their families")
{
    auto run = [](const char* file) {
        const auto spec = load_problem(oracle::corpus(file));
        const auto dep = functional_dependence_test(LagrangeSystem(spec.spray, spec.lagrangian), spec.plan);
        REQUIRE(dep.dependent);
        return classify(dep.cloud);
    };
    CHECK(std::holds_alternative<ConstantFamily>(run("exp-class.json").chosen));
    CHECK(std::holds_alternative<LogarithmicFamily>(run("log-class.json").chosen));
    const auto m = run("moebius.json");
    REQUIRE(std::holds_alternative<MoebiusFamily>(m.chosen));
    CHECK(std::abs(std::get<MoebiusFamily>(m.chosen).c - 0.5) <= 1e-5);
    CHECK(std::abs(std::get<MoebiusFamily>(m.chosen).d - 1.0) <= 1e-5);
    const auto l = run("lienard.json");
    REQUIRE(std::holds_alternative<PowerShiftFamily>(l.chosen));
    CHECK(std::abs(std::get<PowerShiftFamily>(l.chosen).gamma - 0.5) <= 1e-6);
}

}
