#include "lagdeform/deform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lagdeform/errors.hpp"

namespace lagdeform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string show(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

// Moebius numerator chosen so that a d - b c > 0.
std::pair<double, double> moebius_numerator(const MoebiusFamily& m)
{
    if (m.d != 0.0) return {m.d > 0.0 ? 1.0 : -1.0, 0.0};
    return {0.0, m.c > 0.0 ? -1.0 : 1.0};
}

// Family formula before scale and shift.
std::array<double, 3> family_jet(const ClosedForm& c, double t)
{
    const double s = c.branch;
    return std::visit(
        overloaded{
            [t](const ConstantFamily& f) -> std::array<double, 3> {
                if (f.gamma == 0.0) return {t, 1.0, 0.0};
                const double e = std::exp(f.gamma * t);
                return {e / f.gamma, e, f.gamma * e};
            },
            [t, s](const PowerShiftFamily& f) -> std::array<double, 3> {
                const double u = s * (t + f.a);
                const double d1 = std::pow(u, f.gamma);
                return {s * u * d1 / (1.0 + f.gamma), d1, s * f.gamma * d1 / u};
            },
            [t, s](const LogarithmicFamily& f) -> std::array<double, 3> {
                const double u = s * (t + f.a);
                return {s * std::log(u), 1.0 / u, -s / (u * u)};
            },
            [t](const MoebiusFamily& f) -> std::array<double, 3> {
                const auto [a, b] = moebius_numerator(f);
                const double den = f.c * t + f.d;
                const double det = a * f.d - b * f.c;
                return {(a * t + b) / den, det / (den * den), -2.0 * f.c * det / (den * den * den)};
            },
            [t](const HomogeneousRootFamily& f) -> std::array<double, 3> {
                const double q = 1.0 / f.p;
                const double v = std::pow(t, q);
                return {v, q * v / t, q * (q - 1.0) * v / (t * t)};
            },
            [](const TabulatedFamily&) -> std::array<double, 3> {
                throw std::logic_error("tabulated class has no closed form");
            },
        },
        c.cls);
}

Expression family_expression(const ClosedForm& c, const Expression& L)
{
    const bool pos = c.branch > 0;
    return std::visit(overloaded{
                          [&](const ConstantFamily& f) {
                              if (f.gamma == 0.0) return L;
                              return exp(f.gamma * L) / f.gamma;
                          },
                          [&](const PowerShiftFamily& f) {
                              const Expression u = L + f.a;
                              if (pos) return pow(u, 1.0 + f.gamma) / (1.0 + f.gamma);
                              return pow(-u, 1.0 + f.gamma) * (-1.0 / (1.0 + f.gamma));
                          },
                          [&](const LogarithmicFamily& f) {
                              const Expression u = L + f.a;
                              return pos ? ln(u) : -ln(-u);
                          },
                          [&](const MoebiusFamily& f) {
                              const auto [a, b] = moebius_numerator(f);
                              return (a * L + b) / (f.c * L + f.d);
                          },
                          [&](const HomogeneousRootFamily& f) { return pow(L, 1.0 / f.p); },
                          [](const TabulatedFamily&) -> Expression {
                              throw std::logic_error("tabulated class has no closed form");
                          },
                      },
                      c.cls);
}

// Side of a singular point s0 that contains [lo, hi]; DomainConflict if none.
std::pair<int, Interval> side_of(double s0, Interval range, const std::string& what)
{
    if (range.lo > s0) return {1, {s0, kInf}};
    if (range.hi < s0) return {-1, {-kInf, s0}};
    throw DomainConflict("L-range [" + show(range.lo) + ", " + show(range.hi) + "] meets the singularity " + what +
                         " = 0 at L = " + show(s0));
}

double hermite(double y0, double y1, double m0, double m1, double h, double t)
{
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double hermite_derivative(double y0, double y1, double m0, double m1, double h, double t)
{
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * m0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * h * m1) /
           h;
}

std::array<double, 3> numeric_jet(const NumericForm& n, double t)
{
    const double lo = n.grid.front();
    const double hi = n.grid.back();
    if (!(t >= lo && t <= hi)) throw OutOfInterval(t, lo, hi);
    const double h = n.grid[1] - n.grid[0];
    auto k = static_cast<std::size_t>(std::floor((t - lo) / h));
    k = std::min(k, n.grid.size() - 2);
    const double s = (t - n.grid[k]) / h;
    return {hermite(n.phi[k], n.phi[k + 1], n.dphi[k], n.dphi[k + 1], h, s),
            hermite(n.dphi[k], n.dphi[k + 1], n.slope[k], n.slope[k + 1], h, s),
            hermite_derivative(n.dphi[k], n.dphi[k + 1], n.slope[k], n.slope[k + 1], h, s)};
}

// Four-point Lagrange interpolation of the cloud at t.
double interpolate_cloud(const std::vector<CloudPoint>& cloud, double t)
{
    const auto it = std::lower_bound(cloud.begin(), cloud.end(), t,
                                     [](const CloudPoint& p, double v) { return p.L < v; });
    const long idx = it - cloud.begin();
    const long first = std::clamp(idx - 2, 0L, static_cast<long>(cloud.size()) - 4);
    double sum = 0.0;
    for (long i = first; i < first + 4; ++i) {
        double w = 1.0;
        for (long j = first; j < first + 4; ++j)
            if (j != i) w *= (t - cloud[static_cast<std::size_t>(j)].L) /
                             (cloud[static_cast<std::size_t>(i)].L - cloud[static_cast<std::size_t>(j)].L);
        sum += w * cloud[static_cast<std::size_t>(i)].f;
    }
    return sum;
}

} // namespace

// ---------------------------------------------------------------------------

Interval Deformation::domain() const
{
    if (const auto* c = closed_form()) return c->domain;
    const auto& n = std::get<NumericForm>(data_);
    return {n.grid.front(), n.grid.back()};
}

std::array<double, 3> Deformation::jet(double t) const
{
    if (const auto* c = closed_form()) {
        if (!(t > c->domain.lo && t < c->domain.hi)) throw OutOfInterval(t, c->domain.lo, c->domain.hi);
        auto j = family_jet(*c, t);
        return {c->scale * j[0] + c->shift, c->scale * j[1], c->scale * j[2]};
    }
    return numeric_jet(std::get<NumericForm>(data_), t);
}

std::optional<Expression> Deformation::compose(const Expression& L) const
{
    const auto* c = closed_form();
    if (!c) return std::nullopt;
    return c->scale * family_expression(*c, L) + c->shift;
}

Deformation Deformation::affine(double alpha, double beta) const
{
    if (!(alpha > 0.0)) throw std::invalid_argument("affine rescaling needs alpha > 0");
    if (const auto* c = closed_form()) {
        ClosedForm out = *c;
        out.scale = alpha * c->scale;
        out.shift = alpha * c->shift + beta;
        return Deformation(out);
    }
    NumericForm n = std::get<NumericForm>(data_);
    for (auto& v : n.phi) v = alpha * v + beta;
    for (auto& v : n.dphi) v *= alpha;
    for (auto& v : n.slope) v *= alpha;
    return Deformation(n);
}

std::string Deformation::describe() const
{
    if (auto e = compose(Expression::variable("L"))) return "phi(L) = " + e->to_string();
    const auto& n = std::get<NumericForm>(data_);
    return "numeric phi on [" + show(n.grid.front()) + ", " + show(n.grid.back()) + "], " +
           std::to_string(n.grid.size()) + " nodes";
}

Deformation synthesize(const DeformationClass& cls, Interval range)
{
    if (const auto* tab = std::get_if<TabulatedFamily>(&cls)) return synthesize_numeric(tab->points);
    if (!(range.lo <= range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi))
        throw DomainConflict("invalid L-range");

    ClosedForm c;
    c.cls = cls;
    c.domain = {-kInf, kInf};
    std::visit(overloaded{
                   [](const ConstantFamily&) {},
                   [&](const PowerShiftFamily& f) {
                       if (f.gamma == 0.0 || f.gamma == -1.0)
                           throw DomainConflict("PowerShift needs gamma outside {0, -1}");
                       std::tie(c.branch, c.domain) = side_of(-f.a, range, "L + a");
                   },
                   [&](const LogarithmicFamily& f) { std::tie(c.branch, c.domain) = side_of(-f.a, range, "L + a"); },
                   [&](const MoebiusFamily& f) {
                       if (f.c == 0.0 && f.d == 0.0) throw DomainConflict("Moebius needs (c, d) != (0, 0)");
                       if (f.c != 0.0) std::tie(c.branch, c.domain) = side_of(-f.d / f.c, range, "cL + d");
                   },
                   [&](const HomogeneousRootFamily& f) {
                       if (!(f.p > 0.0)) throw DomainConflict("HomogeneousRoot needs p > 0");
                       if (!(range.lo > 0.0)) throw DomainConflict("HomogeneousRoot needs L > 0 on the L-range");
                       c.domain = {0.0, kInf};
                   },
                   [](const TabulatedFamily&) {},
               },
               cls);
    return Deformation(c);
}

Deformation synthesize_numeric(const std::vector<CloudPoint>& cloud, std::size_t m)
{
    if (cloud.size() < 8)
        throw InsufficientSamples("numeric deformation needs at least 8 cloud points, got " +
                                  std::to_string(cloud.size()));
    for (std::size_t k = 1; k < cloud.size(); ++k)
        if (!(cloud[k].L > cloud[k - 1].L)) throw std::invalid_argument("cloud must be sorted by increasing L");
    if (m < 2) throw std::invalid_argument("grid needs at least 2 nodes");

    NumericForm n;
    const double lo = cloud.front().L;
    const double hi = cloud.back().L;
    const double h = (hi - lo) / static_cast<double>(m - 1);
    std::vector<double> f(m);
    n.grid.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        n.grid[k] = k + 1 == m ? hi : lo + h * static_cast<double>(k);
        f[k] = interpolate_cloud(cloud, n.grid[k]);
    }

    // F = int f, phi' = exp(F), phi = int phi'.
    n.dphi.resize(m);
    n.phi.resize(m);
    double F = 0.0;
    n.dphi[0] = 1.0;
    n.phi[0] = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        F += 0.5 * h * (f[k - 1] + f[k]);
        n.dphi[k] = std::exp(F);
        n.phi[k] = n.phi[k - 1] + 0.5 * h * (n.dphi[k - 1] + n.dphi[k]);
    }

    // Nodal slopes of phi' are f phi'; Fritsch-Carlson limiting keeps the
    // cubic monotone between nodes and so phi' > 0.
    n.slope.resize(m);
    for (std::size_t k = 0; k < m; ++k) n.slope[k] = f[k] * n.dphi[k];
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const double delta = (n.dphi[k + 1] - n.dphi[k]) / h;
        if (delta == 0.0) {
            n.slope[k] = n.slope[k + 1] = 0.0;
            continue;
        }
        double a = n.slope[k] / delta;
        double b = n.slope[k + 1] / delta;
        if (a < 0.0) n.slope[k] = a = 0.0;
        if (b < 0.0) n.slope[k + 1] = b = 0.0;
        const double r = a * a + b * b;
        if (r > 9.0) {
            const double tau = 3.0 / std::sqrt(r);
            n.slope[k] = tau * a * delta;
            n.slope[k + 1] = tau * b * delta;
        }
    }
    return Deformation(std::move(n));
}

std::array<double, 3> phi_eval(const Deformation& phi, double t) { return phi.jet(t); }

PhiJet jet_of(const Deformation& phi)
{
    return [phi](double t) { return phi.jet(t); };
}

// ---------------------------------------------------------------------------

DeformedLagrangian::DeformedLagrangian(ScalarField L, std::optional<Deformation> phi)
    : L_(std::move(L)), phi_(std::move(phi))
{
    const int n = L_.n;
    std::vector<Expression> out{L_.expr, liouville_apply(L_).expr};
    for (int i = 0; i < n; ++i) out.push_back(partial(L_.expr, x_name(i)));
    for (int i = 0; i < n; ++i) out.push_back(partial(L_.expr, y_name(i)));
    for (const auto& row : fiber_hessian(L_))
        for (const auto& e : row) out.push_back(e);
    program_ = Program(out, chart_variables(n));
}

DeformedLagrangian::Values DeformedLagrangian::eval(const PhasePoint& p) const
{
    const auto n = static_cast<std::size_t>(L_.n);
    const auto v = program_.run(p.flat());
    const std::array<double, 3> j = phi_ ? phi_->jet(v[0]) : std::array<double, 3>{v[0], 1.0, 0.0};
    Values out;
    out.value = j[0];
    out.energy = j[1] * v[1] - j[0];
    out.dx.resize(n);
    out.dy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.dx[i] = j[1] * v[2 + i];
        out.dy[i] = j[1] * v[2 + n + i];
    }
    return out;
}

std::vector<double> DeformedLagrangian::hessian(const PhasePoint& p) const
{
    const auto n = static_cast<std::size_t>(L_.n);
    const auto v = program_.run(p.flat());
    const std::array<double, 3> j = phi_ ? phi_->jet(v[0]) : std::array<double, 3>{v[0], 1.0, 0.0};
    std::vector<double> g(n * n);
    const double* Ly = &v[2 + n];
    const double* h = &v[2 + 2 * n];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) g[i * n + k] = j[2] * Ly[i] * Ly[k] + j[1] * h[i * n + k];
    return g;
}

// ---------------------------------------------------------------------------

VerifyReport verify_deformed_el(const SemiSpray& S, const ScalarField& L, const Deformation& phi,
                                const SamplePlan& plan, double tol)
{
    const int n = S.n;
    const auto un = static_cast<std::size_t>(n);
    const LagrangeSystem sys(S, L);

    std::optional<Program> direct_program;
    Guards guards{{}, {L.expr}};
    for (const auto& c : sys.defect().components) guards.evaluable.push_back(c);
    if (auto composed = phi.compose(L.expr)) {
        const auto form = lagrange_differential(S, ScalarField{n, *composed});
        direct_program.emplace(form.components, chart_variables(n));
    }

    VerifyReport rep;
    rep.direct.id = "deformed_el_direct";
    rep.expanded.id = "deformed_el_expanded";
    rep.agreement.id = "deformed_el_agreement";
    rep.direct.tolerance = rep.expanded.tolerance = rep.agreement.tolerance = tol;

    const SampleSet set = draw_samples(n, plan, guards);
    std::size_t evaluated = 0;
    PointValues v;
    std::vector<double> direct(un);
    for (const auto& p : set.points) {
        if (!sys.try_eval(p, v)) continue;
        std::array<double, 3> j{};
        try {
            j = phi.jet(v.L);
        } catch (const OutOfInterval&) {
            ++rep.out_of_interval;
            continue;
        }
        if (direct_program && !direct_program->try_run(p.flat(), direct)) {
            ++rep.out_of_interval;
            continue;
        }
        ++evaluated;
        for (std::size_t i = 0; i < un; ++i) {
            const double a = j[2] * v.SL * v.Ly[i];
            const double b = j[1] * v.defect[i];
            const double expanded = a + b;
            if (!direct_program) direct[i] = expanded;
            const double scale = 1.0 + std::abs(a) + std::abs(b);
            const int c = static_cast<int>(i);
            rep.direct.add(std::abs(direct[i]) / scale, p, c);
            rep.expanded.add(std::abs(expanded) / scale, p, c);
            rep.agreement.add(std::abs(direct[i] - expanded) / scale, p, c);
        }
    }
    for (auto* r : {&rep.direct, &rep.expanded, &rep.agreement}) {
        r->accepted = evaluated;
        r->rejected = set.rejected + (set.points.size() - evaluated);
        r->close();
    }
    if (!direct_program) rep.direct.notes.push_back("numeric deformation: direct form by pointwise chain rule");
    if (rep.out_of_interval)
        rep.direct.notes.push_back(std::to_string(rep.out_of_interval) + " samples outside the domain of phi");
    rep.pass = rep.direct.pass && evaluated > 0;
    return rep;
}

HessianReport deformed_hessian(const LagrangeSystem& sys, const Deformation& phi, const SamplePlan& plan)
{
    return hessian_report(sys, jet_of(phi), plan);
}

} // namespace lagdeform
