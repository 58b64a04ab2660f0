#include <doctest.h>

#include <cmath>
#include <random>

#include "lagdeform/errors.hpp"
#include "lagdeform/expr.hpp"
#include "support/oracle.hpp"

using namespace lagdeform;

namespace {

const std::set<std::string> kVars{"x1", "x2", "x3", "y1", "y2", "y3"};

Binding random_binding(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Binding b;
    for (const auto& v : kVars) b.set(v, u(rng));
    return b;
}

} // namespace

TEST_SUITE("expr") {

TEST_CASE("parse builds the expected trees")
{
    const auto e = parse("y1^2 + y2^2", kVars);
    CHECK(e.op() == Op::Add);
    CHECK(e.lhs().op() == Op::Pow);
    CHECK(e.lhs().value() == 2.0);
    CHECK(e.lhs().lhs().name() == "y1");
    CHECK(e.rhs().op() == Op::Pow);
    CHECK(e.rhs().lhs().name() == "y2");

    const auto h = parse("0.5*exp(2*x1)*(y1^2+y2^2+y3^2)", kVars);
    CHECK(free_variables(h) == std::set<std::string>{"x1", "y1", "y2", "y3"});
    const Binding b{{"x1", 0.25}, {"y1", 1}, {"y2", 2}, {"y3", 3}};
    CHECK(evaluate(h, b) == doctest::Approx(0.5 * std::exp(0.5) * 14).epsilon(1e-15));
}

TEST_CASE("syntax errors carry the offset")
{
    try {
        parse("x1 +* y1", kVars);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse("(x1", kVars), ParseError);
    CHECK_THROWS_AS(parse("x1 2", kVars), ParseError);
    CHECK_THROWS_AS(parse("", kVars), ParseError);
}

TEST_CASE("undeclared identifiers are named")
{
    try {
        parse("x1 + omega", kVars);
        FAIL("expected UndeclaredIdentifier");
    } catch (const UndeclaredIdentifier& e) {
        CHECK(e.name() == "omega");
        CHECK(e.offset() == 5);
    }
}

TEST_CASE("precedence: pow binds tighter than unary minus")
{
    const Binding b{{"y1", 3}};
    CHECK(evaluate(parse("-y1^2", kVars), b) == -9.0);
    CHECK(evaluate(parse("2*-y1", kVars), b) == -6.0);
    CHECK(evaluate(parse("1 - 2 - 3", kVars), b) == -4.0);
    CHECK(evaluate(parse("12 / 3 / 2", kVars), b) == 2.0);
    CHECK(evaluate(parse("2^-1", kVars), b) == 0.5);
}

TEST_CASE("evaluate")
{
    const Binding b{{"y1", 2}, {"y2", 1}};
    CHECK(evaluate(parse("y1^2+y2^2", kVars), b) == 5.0);
    CHECK(evaluate(parse("0.5*(y1^2+y2^2)", kVars), b) == 2.5);
    CHECK_THROWS_AS(evaluate(parse("ln(x1)", kVars), Binding{{"x1", -1}}), DomainViolation);
    CHECK_THROWS_AS(evaluate(parse("1/x1", kVars), Binding{{"x1", 0}}), DomainViolation);
    CHECK_THROWS_AS(evaluate(parse("sqrt(x1)", kVars), Binding{{"x1", -1}}), DomainViolation);
    CHECK_THROWS_AS(evaluate(parse("x1^-1", kVars), Binding{{"x1", 0}}), DomainViolation);
    CHECK_THROWS_AS(evaluate(parse("x1 + x2", kVars), Binding{{"x1", 1}}), UnboundVariable);
}

TEST_CASE("DomainViolation names the subexpression")
{
    try {
        evaluate(parse("y1 + ln(x1)", kVars), Binding{{"x1", -1}, {"y1", 0}});
        FAIL("expected DomainViolation");
    } catch (const DomainViolation& e) {
        CHECK(e.subexpression().find("ln") != std::string::npos);
    }
}

TEST_CASE("partial derivatives")
{
    std::mt19937_64 rng(3);
    const auto d1 = partial(parse("y1^2+y2^2", kVars), "y1");
    const auto d2 = partial(parse("0.5*exp(2*x1)*(y1^2+y2^2+y3^2)", kVars), "x1");
    const auto want2 = parse("exp(2*x1)*(y1^2+y2^2+y3^2)", kVars);
    for (int k = 0; k < 20; ++k) {
        const Binding b = random_binding(rng);
        CHECK(evaluate(d1, b) == doctest::Approx(2 * b.at("y1")).epsilon(1e-15));
        CHECK(evaluate(d2, b) == doctest::Approx(evaluate(want2, b)).epsilon(1e-14));
    }
    CHECK(partial(parse("x2", kVars), "y1").to_string() == "0");
    CHECK(partial(parse("y1^2+y2^2", kVars), "x3").is_constant(0.0));
}

TEST_CASE("abs differentiates to sign, which is undefined at 0")
{
    const auto d = partial(parse("abs(x1)", kVars), "x1");
    CHECK(evaluate(d, Binding{{"x1", -2}}) == -1.0);
    CHECK(evaluate(d, Binding{{"x1", 3}}) == 1.0);
    CHECK_THROWS_AS(evaluate(d, Binding{{"x1", 0}}), DomainViolation);
}

TEST_CASE("evaluate_dual")
{
    auto [v1, d1] = evaluate_dual(parse("y1^2", kVars), Binding{{"y1", 3}}, "y1");
    CHECK(v1 == 9.0);
    CHECK(d1 == 6.0);
    auto [v2, d2] = evaluate_dual(parse("exp(2*x1)", kVars), Binding{{"x1", 0}}, "x1");
    CHECK(v2 == 1.0);
    CHECK(d2 == 2.0);
    auto [v3, d3] = evaluate_dual(parse("(y1+2*x1)^2", kVars), Binding{{"x1", 1}, {"y1", 1}}, "y1");
    CHECK(v3 == 9.0);
    CHECK(d3 == 6.0);
    CHECK_THROWS_AS(evaluate_dual(parse("ln(x1)", kVars), Binding{{"x1", -1}}, "x1"), DomainViolation);
}

TEST_CASE("symbolic, dual and finite-difference derivatives agree on random expressions")
{
    std::vector<std::string> vars(kVars.begin(), kVars.end());
    oracle::ExpressionGenerator gen(vars, 11);
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int k = 0; k < 300; ++k) {
        const auto e = gen(4);
        const auto& v = vars[static_cast<std::size_t>(k) % vars.size()];
        const Binding b = random_binding(rng);
        double sym = 0, dual = 0, fd = 0;
        try {
            sym = evaluate(partial(e, v), b);
            dual = evaluate_dual(e, b, v).second;
            fd = oracle::central_difference(e, b, v);
        } catch (const DomainViolation&) {
            continue;
        }
        ++checked;
        CHECK(std::abs(sym - dual) <= 1e-10 * (1 + std::abs(sym)));
        CHECK(std::abs(sym - fd) <= 1e-5 * (1 + std::abs(sym)));
    }
    CHECK(checked > 250);
}

TEST_CASE("mixed partials commute")
{
    std::vector<std::string> vars(kVars.begin(), kVars.end());
    oracle::ExpressionGenerator gen(vars, 5);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 50; ++k) {
        const auto e = gen(3);
        const auto a = partial(partial(e, "y1"), "y2");
        const auto c = partial(partial(e, "y2"), "y1");
        const Binding b = random_binding(rng);
        try {
            const double u = evaluate(a, b);
            CHECK(std::abs(u - evaluate(c, b)) <= 1e-10 * (1 + std::abs(u)));
        } catch (const DomainViolation&) {
        }
    }
}

TEST_CASE("printing round-trips through the parser")
{
    std::vector<std::string> vars(kVars.begin(), kVars.end());
    oracle::ExpressionGenerator gen(vars, 9);
    std::mt19937_64 rng(10);
    for (int k = 0; k < 100; ++k) {
        const auto e = gen(4);
        const auto back = parse(e.to_string(), kVars);
        for (int j = 0; j < 3; ++j) {
            const Binding b = random_binding(rng);
            try {
                CHECK(evaluate(back, b) == evaluate(e, b));
            } catch (const DomainViolation&) {
            }
        }
    }
}

TEST_CASE("evaluation is deterministic")
{
    const auto e = parse("sin(x1)*exp(y1)/(2+cos(x2)) + sqrt(1+y2^2)^1.5", kVars);
    const Binding b{{"x1", 0.3}, {"x2", -0.7}, {"y1", 1.1}, {"y2", 0.2}};
    const double first = evaluate(e, b);
    for (int k = 0; k < 10; ++k) CHECK(evaluate(e, b) == first);
}

TEST_CASE("format_number is the shortest round-trip")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(2.0) == "2");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

}
