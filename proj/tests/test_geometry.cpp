#include <doctest.h>

#include <cmath>

#include "lagdeform/errors.hpp"
#include "lagdeform/geometry.hpp"
#include "lagdeform/theorem.hpp"
#include "support/oracle.hpp"

using namespace lagdeform;

namespace {

const std::map<std::string, double> kDissParams{{"a", 1}, {"b", 1}, {"omega", 1}};

SemiSpray dissipative_spray()
{
    return oracle::spray(2, {"(a*x1 + b*x2 + omega*y1)/2", "(-b*x1 + a*x2 - omega*y2)/2"}, kDissParams);
}

SemiSpray lienard_spray() { return oracle::spray(1, {"(y1 - 2*x1)/2"}); }

double at(const ScalarField& f, const Binding& b) { return evaluate(f.expr, b); }

std::vector<PhasePoint> points(int n, std::size_t count, std::uint64_t seed)
{
    return draw_samples(n, oracle::unit_plan(n, count, seed), {}).points;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("Liouville field")
{
    const auto kin = oracle::field(2, "(y1^2 + y2^2)/2");
    const auto C = liouville_apply(kin);
    for (const auto& p : points(2, 20, 1)) {
        const auto b = oracle::bind(p);
        CHECK(at(C, b) == doctest::Approx(2 * at(kin, b)).epsilon(1e-14));
    }
    CHECK(liouville_apply(oracle::field(2, "x1")).expr.is_constant(0.0));
    const auto lien = oracle::field(1, "(y1 + 2*x1)^2");
    CHECK(at(liouville_apply(lien), {{"x1", 1}, {"y1", 1}}) == doctest::Approx(6.0));
}

TEST_CASE("spray derivative")
{
    const auto kin = oracle::field(2, "(y1^2 + y2^2)/2");
    const Binding b{{"x1", 1}, {"x2", 0}, {"y1", 2}, {"y2", 1}};
    CHECK(at(spray_apply(dissipative_spray(), kin), b) == doctest::Approx(-4.0));
    CHECK(spray_apply(dissipative_spray(), oracle::field(2, "3")).expr.is_constant(0.0));

    const auto lien = oracle::field(1, "(y1 + 2*x1)^2");
    const auto SL = spray_apply(lienard_spray(), lien);
    CHECK(at(SL, {{"x1", 1}, {"y1", 1}}) == doctest::Approx(18.0));
    for (const auto& p : points(1, 20, 2)) {
        const auto pb = oracle::bind(p);
        CHECK(at(SL, pb) == doctest::Approx(2 * at(lien, pb)).epsilon(1e-13));
    }
}

TEST_CASE("energy")
{
    const auto kin = oracle::field(2, "(y1^2 + y2^2)/2");
    CHECK(at(energy(kin), {{"y1", 2}, {"y2", 1}}) == doctest::Approx(2.5));
    CHECK(at(energy(oracle::field(1, "y1")), {{"x1", 0.3}, {"y1", 1.7}}) == 0.0);

    const auto hom = oracle::field(3, "exp(2*x1)*(y1^2 + y2^2 + y3^2)^1.5");
    const auto E = energy(hom);
    for (const auto& p : points(3, 20, 3)) {
        const auto b = oracle::bind(p);
        CHECK(at(E, b) == doctest::Approx(2.0 * at(hom, b)).epsilon(1e-12));
    }
}

TEST_CASE("vertical differential")
{
    const auto dJ = vertical_differential(oracle::field(2, "(y1^2 + y2^2)/2"));
    const Binding b{{"x1", 0.1}, {"x2", 0.2}, {"y1", 2}, {"y2", 1}};
    CHECK(evaluate(dJ.components[0], b) == 2.0);
    CHECK(evaluate(dJ.components[1], b) == 1.0);
    const auto zero = vertical_differential(oracle::field(2, "x1"));
    CHECK(zero.components[0].is_constant(0.0));
    CHECK(zero.components[1].is_constant(0.0));
    const auto lien = vertical_differential(oracle::field(1, "(y1 + 2*x1)^2"));
    CHECK(evaluate(lien.components[0], {{"x1", 1}, {"y1", 1}}) == doctest::Approx(6.0));
}

TEST_CASE("Lagrange differential")
{
    const auto lien = lagrange_differential(lienard_spray(), oracle::field(1, "(y1 + 2*x1)^2"));
    CHECK(evaluate(lien.components[0], {{"x1", 1}, {"y1", 1}}) == doctest::Approx(-6.0));

    const auto flat = lagrange_differential(oracle::spray(3, {"0", "0", "0"}),
                                            oracle::field(3, "(y1^2 + y2^2 + y3^2)/2"));
    for (const auto& c : flat.components) CHECK(c.is_constant(0.0));

    const auto diss = lagrange_differential(dissipative_spray(), oracle::field(2, "(y1^2 + y2^2)/2"));
    const Binding b{{"x1", 1}, {"x2", 0}, {"y1", 2}, {"y2", 1}};
    CHECK(evaluate(diss.components[0], b) == doctest::Approx(-3.0));
    CHECK(evaluate(diss.components[1], b) == doctest::Approx(2.0));
}

TEST_CASE("fiber Hessian")
{
    const auto g = fiber_hessian(oracle::field(2, "(y1^2 + y2^2)/2"));
    const Binding b{{"x1", 0}, {"x2", 0}, {"y1", 2}, {"y2", 1}};
    CHECK(evaluate(g[0][0], b) == 1.0);
    CHECK(evaluate(g[0][1], b) == 0.0);
    CHECK(evaluate(g[1][1], b) == 1.0);

    CHECK(evaluate(fiber_hessian(oracle::field(1, "(y1 + 2*x1)^2"))[0][0], {{"x1", 0.4}, {"y1", 0.9}}) == 2.0);

    // a * |y| at y = (2, 1): a / 5^(3/2) [[1, -2], [-2, 4]], rank 1
    const double a = 1.7;
    const auto s = fiber_hessian(oracle::field(2, "a*sqrt(y1^2 + y2^2)", {{"a", a}}));
    const double k = a / std::pow(5.0, 1.5);
    CHECK(evaluate(s[0][0], b) == doctest::Approx(k));
    CHECK(evaluate(s[0][1], b) == doctest::Approx(-2 * k));
    CHECK(evaluate(s[1][0], b) == doctest::Approx(-2 * k));
    CHECK(evaluate(s[1][1], b) == doctest::Approx(4 * k));
    std::vector<double> m{evaluate(s[0][0], b), evaluate(s[0][1], b), evaluate(s[1][0], b), evaluate(s[1][1], b)};
    CHECK(symmetric_rank(m, 2) == 1);
}

TEST_CASE("contractions")
{
    const auto S = dissipative_spray();
    const auto L = oracle::field(2, "(y1^2 + y2^2)/2");
    const auto zero = make_form({Expression(0.0), Expression(0.0)});
    CHECK(contract_with_spray(S, zero).expr.is_constant(0.0));
    const auto c1 = contract_with_spray(S, vertical_differential(L));
    const auto c2 = contract_with_spray(S, lagrange_differential(S, L));
    for (const auto& p : points(2, 20, 4)) {
        const auto b = oracle::bind(p);
        CHECK(at(c1, b) == doctest::Approx(at(liouville_apply(L), b)).epsilon(1e-13));
        CHECK(at(c2, b) == doctest::Approx(at(spray_apply(S, energy(L)), b)).epsilon(1e-13));
    }
}

TEST_CASE("homogeneity degree")
{
    const auto plan = oracle::unit_plan(3, 50, 5);
    const auto hom = oracle::field(3, "0.5*exp(2*x1)*(y1^2 + y2^2 + y3^2)");
    const auto deg = homogeneity_degree(hom, plan);
    REQUIRE(deg);
    CHECK(*deg == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_FALSE(homogeneity_degree(oracle::field(2, "(y1^2 + y2^2)/2 + x1"), oracle::unit_plan(2, 50, 5)));
    const auto root = oracle::field(3, "sqrt(0.5*exp(2*x1)*(y1^2 + y2^2 + y3^2))");
    const auto d1 = homogeneity_degree(root, plan);
    REQUIRE(d1);
    CHECK(*d1 == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(homogeneity_degree(oracle::spray(3, {"-(y1^2 + y2^2 + y3^2)/2", "0", "0"}), plan) == 2.0);
    CHECK_FALSE(homogeneity_degree(dissipative_spray(), oracle::unit_plan(2, 50, 5)));
}

TEST_CASE("identities on random problems")
{
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const int n = 1 + static_cast<int>(seed % 3);
        const auto [S, L] = oracle::random_problem(n, seed);
        const auto c1 = contract_with_spray(S, vertical_differential(L));
        const auto C = liouville_apply(L);
        const auto c2 = contract_with_spray(S, lagrange_differential(S, L));
        const auto SE = spray_apply(S, energy(L));
        const auto g = fiber_hessian(L);
        for (const auto& p : points(n, 40, seed)) {
            const auto b = oracle::bind(p);
            try {
                CHECK(oracle::rel_err(at(c1, b), at(C, b)) <= 1e-10);
                CHECK(oracle::rel_err(at(c2, b), at(SE, b)) <= 1e-10);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        const double gij = evaluate(g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], b);
                        const double gji = evaluate(g[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], b);
                        CHECK(std::abs(gij - gji) <= 1e-12);
                    }
            } catch (const DomainViolation&) {
            }
        }
    }
}

TEST_CASE("Euler relation for homogeneous fields")
{
    const auto plan = oracle::unit_plan(2, 40, 8);
    const auto F = oracle::field(2, "exp(x2)*(y1^2 + y1*y2 + 3*y2^2)^1.25");
    const auto p = homogeneity_degree(F, plan);
    REQUIRE(p);
    CHECK(*p == doctest::Approx(2.5).epsilon(1e-9));
    const auto C = liouville_apply(F);
    for (const auto& q : points(2, 40, 8)) {
        const auto b = oracle::bind(q);
        CHECK(std::abs(at(C, b) - *p * at(F, b)) <= 1e-9 * (1 + std::abs(at(F, b))));
    }
}

TEST_CASE("Lagrange differential is linear")
{
    const auto S = dissipative_spray();
    const auto L1 = oracle::field(2, "(y1^2 + y2^2)/2");
    const auto L2 = oracle::field(2, "sin(x1)*y1*y2 + exp(x2)*y2^3");
    const double a = 2.5, c = -0.75;
    const ScalarField combo{2, a * L1.expr + c * L2.expr + 4.0};
    const auto lhs = lagrange_differential(S, combo);
    const auto rhs = combine(a, lagrange_differential(S, L1), c, lagrange_differential(S, L2));
    for (const auto& p : points(2, 30, 9)) {
        const auto b = oracle::bind(p);
        for (int i = 0; i < 2; ++i) {
            const double u = evaluate(lhs.components[static_cast<std::size_t>(i)], b);
            CHECK(oracle::rel_err(u, evaluate(rhs.components[static_cast<std::size_t>(i)], b)) <= 1e-12);
        }
    }
}

}
