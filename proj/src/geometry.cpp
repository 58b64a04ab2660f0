#include "lagdeform/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "lagdeform/errors.hpp"
#include "lagdeform/program.hpp"

namespace lagdeform {

namespace {

void require_same_dim(int a, int b, const char* what)
{
    if (a != b)
        throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a) + " and " +
                                std::to_string(b) + " differ");
}

Expression dot_y(int n, const std::vector<Expression>& coeffs)
{
    Expression sum;
    for (int i = 0; i < n; ++i) sum = sum + Expression::variable(y_name(i)) * coeffs[static_cast<std::size_t>(i)];
    return sum;
}

} // namespace

SemiSpray make_spray(std::vector<Expression> G)
{
    const int n = static_cast<int>(G.size());
    if (n < 1) throw DimensionMismatch("a semi-spray needs at least one coefficient");
    return {n, std::move(G)};
}

SemiBasicForm make_form(std::vector<Expression> components)
{
    const int n = static_cast<int>(components.size());
    return {n, std::move(components)};
}

ScalarField liouville_apply(const ScalarField& F)
{
    std::vector<Expression> dy;
    for (int i = 0; i < F.n; ++i) dy.push_back(partial(F.expr, y_name(i)));
    return {F.n, dot_y(F.n, dy)};
}

ScalarField spray_apply(const SemiSpray& S, const ScalarField& F)
{
    require_same_dim(S.n, F.n, "spray_apply");
    Expression sum;
    for (int i = 0; i < S.n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        sum = sum + Expression::variable(y_name(i)) * partial(F.expr, x_name(i));
        const Expression dy = partial(F.expr, y_name(i));
        if (!S.G[ui].is_constant(0.0) && !dy.is_constant(0.0)) sum = sum - Expression(2.0) * S.G[ui] * dy;
    }
    return {S.n, sum};
}

ScalarField energy(const ScalarField& L) { return {L.n, liouville_apply(L).expr - L.expr}; }

SemiBasicForm vertical_differential(const ScalarField& L)
{
    SemiBasicForm out{L.n, {}};
    for (int i = 0; i < L.n; ++i) out.components.push_back(partial(L.expr, y_name(i)));
    return out;
}

SemiBasicForm lagrange_differential(const SemiSpray& S, const ScalarField& L)
{
    require_same_dim(S.n, L.n, "lagrange_differential");
    SemiBasicForm out{L.n, {}};
    for (int i = 0; i < L.n; ++i) {
        const ScalarField momentum{L.n, partial(L.expr, y_name(i))};
        out.components.push_back(spray_apply(S, momentum).expr - partial(L.expr, x_name(i)));
    }
    return out;
}

ExpressionMatrix fiber_hessian(const ScalarField& L)
{
    const auto n = static_cast<std::size_t>(L.n);
    ExpressionMatrix g(n, std::vector<Expression>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Expression di = partial(L.expr, y_name(static_cast<int>(i)));
        for (std::size_t j = i; j < n; ++j) {
            g[i][j] = partial(di, y_name(static_cast<int>(j)));
            g[j][i] = g[i][j];
        }
    }
    return g;
}

ScalarField contract_with_spray(const SemiSpray& S, const SemiBasicForm& omega)
{
    require_same_dim(S.n, omega.n, "contract_with_spray");
    return {S.n, dot_y(S.n, omega.components)};
}

SemiBasicForm combine(double a, const SemiBasicForm& F, double b, const SemiBasicForm& G)
{
    require_same_dim(F.n, G.n, "combine");
    SemiBasicForm out{F.n, {}};
    for (std::size_t i = 0; i < F.components.size(); ++i)
        out.components.push_back(Expression(a) * F.components[i] + Expression(b) * G.components[i]);
    return out;
}

namespace {

// Common degree of a family of components over sample pairs (x, y), (x, r y).
std::optional<double> common_degree(int n, const std::vector<Expression>& components, const SamplePlan& plan,
                                    std::optional<double> forced)
{
    plan.validate(n);
    const auto names = chart_variables(n);
    const Program program(components, names);
    const std::size_t m = components.size();

    UniformStream rng(plan.seed ^ 0x5bd1e995ULL);
    struct Sample {
        std::vector<double> base;
        std::vector<std::vector<double>> scaled; // per r
    };
    std::vector<Sample> samples;
    const std::size_t wanted = std::min<std::size_t>(plan.count, 200);
    const std::size_t budget = 20 * wanted;
    std::vector<double> point(names.size());
    for (std::size_t attempt = 0; attempt < budget && samples.size() < wanted; ++attempt) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            const auto [lo, hi] = plan.box.at(names[i]);
            point[i] = rng.next(lo, hi);
        }
        bool ok = std::any_of(point.begin() + n, point.end(), [](double v) { return v != 0.0; });
        Sample s{std::vector<double>(m), {}};
        ok = ok && program.try_run(point, s.base);
        for (double r : kHomogeneityScales) {
            if (!ok) break;
            std::vector<double> scaled_point(point);
            for (std::size_t i = static_cast<std::size_t>(n); i < scaled_point.size(); ++i) scaled_point[i] *= r;
            std::vector<double> values(m);
            ok = program.try_run(scaled_point, values);
            s.scaled.push_back(std::move(values));
        }
        if (ok) samples.push_back(std::move(s));
    }
    if (samples.empty()) return std::nullopt;

    // Estimate p from the r = 2 pairs with the largest magnitudes.
    std::vector<double> estimates;
    for (const auto& s : samples)
        for (std::size_t c = 0; c < m; ++c) {
            const double f1 = s.base[c];
            const double f2 = s.scaled[1][c];
            if (std::abs(f1) > plan.guard && f1 * f2 > 0.0) estimates.push_back(std::log2(f2 / f1));
        }
    double p = 0.0;
    if (forced) {
        p = *forced;
    } else {
        if (estimates.empty()) return std::nullopt;
        std::nth_element(estimates.begin(), estimates.begin() + static_cast<long>(estimates.size() / 2),
                         estimates.end());
        p = estimates[estimates.size() / 2];
    }

    bool any_nonzero = false;
    for (const auto& s : samples)
        for (std::size_t c = 0; c < m; ++c) {
            if (s.base[c] != 0.0) any_nonzero = true;
            for (std::size_t k = 0; k < std::size(kHomogeneityScales); ++k) {
                const double expected = std::pow(kHomogeneityScales[k], p) * s.base[c];
                const double got = s.scaled[k][c];
                if (std::abs(got - expected) > kHomogeneityTolerance * (1.0 + std::abs(got) + std::abs(expected)))
                    return std::nullopt;
            }
        }
    if (!any_nonzero && !forced) return std::nullopt;
    return p;
}

} // namespace

std::optional<double> homogeneity_degree(const ScalarField& F, const SamplePlan& plan)
{
    return common_degree(F.n, {F.expr}, plan, std::nullopt);
}

std::optional<double> homogeneity_degree(const SemiBasicForm& sigma, const SamplePlan& plan)
{
    return common_degree(sigma.n, sigma.components, plan, std::nullopt);
}

std::optional<double> homogeneity_degree(const SemiSpray& S, const SamplePlan& plan)
{
    return common_degree(S.n, S.G, plan, 2.0);
}

} // namespace lagdeform
