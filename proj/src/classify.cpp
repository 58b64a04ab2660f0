#include "lagdeform/classify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "lagdeform/dual.hpp"
#include "lagdeform/errors.hpp"

namespace lagdeform {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double round9(double v)
{
    const double r = std::round(v * 1e9) / 1e9;
    return r == 0.0 ? 0.0 : r;
}

std::string num(double v) { return format_number(round9(v)); }

} // namespace

std::string family_name(const DeformationClass& cls)
{
    return std::visit(overloaded{
                          [](const ConstantFamily&) { return std::string("Constant"); },
                          [](const PowerShiftFamily&) { return std::string("PowerShift"); },
                          [](const LogarithmicFamily&) { return std::string("Logarithmic"); },
                          [](const MoebiusFamily&) { return std::string("Moebius"); },
                          [](const HomogeneousRootFamily&) { return std::string("HomogeneousRoot"); },
                          [](const TabulatedFamily&) { return std::string("Tabulated"); },
                      },
                      cls);
}

std::string describe(const DeformationClass& cls)
{
    return std::visit(
        overloaded{
            [](const ConstantFamily& c) { return "Constant(gamma=" + num(c.gamma) + ")"; },
            [](const PowerShiftFamily& c) { return "PowerShift(gamma=" + num(c.gamma) + ", a=" + num(c.a) + ")"; },
            [](const LogarithmicFamily& c) { return "Logarithmic(a=" + num(c.a) + ")"; },
            [](const MoebiusFamily& c) { return "Moebius(c=" + num(c.c) + ", d=" + num(c.d) + ")"; },
            [](const HomogeneousRootFamily& c) { return "HomogeneousRoot(p=" + num(c.p) + ")"; },
            [](const TabulatedFamily& c) { return "Tabulated(points=" + std::to_string(c.points.size()) + ")"; },
        },
        cls);
}

double generating_function(const DeformationClass& cls, double L)
{
    return std::visit(overloaded{
                          [](const ConstantFamily& c) { return c.gamma; },
                          [L](const PowerShiftFamily& c) { return c.gamma / (L + c.a); },
                          [L](const LogarithmicFamily& c) { return -1.0 / (L + c.a); },
                          [L](const MoebiusFamily& c) { return -2.0 * c.c / (c.c * L + c.d); },
                          [L](const HomogeneousRootFamily& c) { return (1.0 / c.p - 1.0) / L; },
                          [L](const TabulatedFamily& c) {
                              const auto& pts = c.points;
                              if (pts.empty()) return 0.0;
                              if (L <= pts.front().L) return pts.front().f;
                              if (L >= pts.back().L) return pts.back().f;
                              auto it = std::lower_bound(pts.begin(), pts.end(), L,
                                                         [](const CloudPoint& p, double v) { return p.L < v; });
                              const auto& hi = *it;
                              const auto& lo = *(it - 1);
                              const double t = (L - lo.L) / (hi.L - lo.L);
                              return lo.f + t * (hi.f - lo.f);
                          },
                      },
                      cls);
}

MoebiusFamily normalize(MoebiusFamily m)
{
    const double scale = std::max(std::abs(m.c), std::abs(m.d));
    if (!(scale > 0.0)) return m;
    double sgn = m.c < 0.0 || (m.c == 0.0 && m.d < 0.0) ? -1.0 : 1.0;
    return {sgn * m.c / scale, sgn * m.d / scale};
}

double fit_residual(const DeformationClass& cls, const std::vector<CloudPoint>& cloud)
{
    if (cloud.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& p : cloud) {
        const double r = (generating_function(cls, p.L) - p.f) / (1.0 + std::abs(p.f));
        sum += r * r;
    }
    const double rms = std::sqrt(sum / static_cast<double>(cloud.size()));
    return std::isfinite(rms) ? rms : std::numeric_limits<double>::infinity();
}

namespace {

// Model signature: parameters and L in, f out; templated for dual numbers.
template <std::size_t P>
using Model = std::function<Dual(const std::array<Dual, P>&, double)>;

template <std::size_t P>
using Feasible = std::function<bool(const std::array<double, P>&)>;

// Damped Gauss-Newton (Levenberg-Marquardt) on weighted residuals with the
// Jacobian from one dual-number sweep per parameter.
template <std::size_t P>
std::array<double, P> levenberg_marquardt(const Model<P>& model, const Feasible<P>& feasible,
                                          std::array<double, P> start, const std::vector<CloudPoint>& cloud,
                                          int iterations = 50)
{
    const auto m = cloud.size();
    auto cost = [&](const std::array<double, P>& q) {
        std::array<Dual, P> d{};
        for (std::size_t j = 0; j < P; ++j) d[j] = Dual(q[j]);
        double c = 0.0;
        for (const auto& pt : cloud) {
            const double r = (model(d, pt.L).v - pt.f) / (1.0 + std::abs(pt.f));
            c += r * r;
        }
        return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
    };

    std::array<double, P> q = start;
    double current = cost(q);
    double lambda = 1e-3;
    Eigen::MatrixXd J(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(P));
    Eigen::VectorXd r(static_cast<Eigen::Index>(m));
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t j = 0; j < P; ++j) {
            std::array<Dual, P> d{};
            for (std::size_t k = 0; k < P; ++k) d[k] = Dual(q[k], k == j ? 1.0 : 0.0);
            for (std::size_t k = 0; k < m; ++k) {
                const Dual y = model(d, cloud[k].L);
                const double w = 1.0 / (1.0 + std::abs(cloud[k].f));
                J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = w * y.d;
                if (j == 0) r(static_cast<Eigen::Index>(k)) = w * (y.v - cloud[k].f);
            }
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.norm() < 1e-300) break;
        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            Eigen::MatrixXd A = JtJ;
            for (Eigen::Index k = 0; k < A.rows(); ++k) A(k, k) += lambda * std::max(JtJ(k, k), 1e-30);
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            std::array<double, P> trial = q;
            for (std::size_t j = 0; j < P; ++j) trial[j] += step(static_cast<Eigen::Index>(j));
            const double c = feasible(trial) ? cost(trial) : std::numeric_limits<double>::infinity();
            if (c < current) {
                q = trial;
                const bool stalled = current - c <= 1e-30 + 1e-15 * current;
                current = c;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (stalled) it = iterations;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) break;
    }
    return q;
}

// L + a keeps a constant nonzero sign over the cloud.
bool shift_admissible(double a, const std::vector<CloudPoint>& cloud)
{
    const double lo = cloud.front().L + a;
    const double hi = cloud.back().L + a;
    return std::isfinite(lo) && std::isfinite(hi) && ((lo > 0.0 && hi > 0.0) || (lo < 0.0 && hi < 0.0));
}

double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

// Fitted values within roundoff of a 9-decimal number are replaced by it, so
// an exact fit reports gamma = -0.5 rather than -0.49999999999999994.
double snap(double v)
{
    const double r = round9(v);
    return std::abs(v - r) <= 1e-12 * (1.0 + std::abs(v)) ? r : v;
}

DeformationClass snapped(DeformationClass cls)
{
    std::visit(overloaded{
                   [](ConstantFamily& f) { f.gamma = snap(f.gamma); },
                   [](PowerShiftFamily& f) { f.gamma = snap(f.gamma); f.a = snap(f.a); },
                   [](LogarithmicFamily& f) { f.a = snap(f.a); },
                   [](MoebiusFamily& f) { f.c = snap(f.c); f.d = snap(f.d); },
                   [](HomogeneousRootFamily&) {},
                   [](TabulatedFamily&) {},
               },
               cls);
    return cls;
}

FamilyFit make_fit(DeformationClass cls, int parameters, const std::vector<CloudPoint>& cloud, double tol, bool valid)
{
    cls = snapped(std::move(cls));
    FamilyFit fit;
    fit.residual = valid ? fit_residual(cls, cloud) : std::numeric_limits<double>::infinity();
    fit.params = std::move(cls);
    fit.parameters = parameters;
    fit.penalized = fit.residual + tol * parameters;
    fit.valid = valid && std::isfinite(fit.residual);
    return fit;
}

FamilyFit fit_constant(const std::vector<CloudPoint>& cloud, double tol)
{
    double num = 0.0, den = 0.0;
    for (const auto& p : cloud) {
        const double w = 1.0 / ((1.0 + std::abs(p.f)) * (1.0 + std::abs(p.f)));
        num += w * p.f;
        den += w;
    }
    return make_fit(ConstantFamily{num / den}, 1, cloud, tol, true);
}

FamilyFit fit_logarithmic(const std::vector<CloudPoint>& cloud, double tol)
{
    // -1/f = L + a is linear in a; weights follow the first-order error
    // propagation back to f.
    double num = 0.0, den = 0.0;
    for (const auto& p : cloud) {
        if (p.f == 0.0) continue;
        const double w = (p.f * p.f) / ((1.0 + std::abs(p.f)) * (1.0 + std::abs(p.f)));
        num += w * (-1.0 / p.f - p.L);
        den += w;
    }
    if (!(den > 0.0)) return make_fit(LogarithmicFamily{0.0}, 1, cloud, tol, false);
    const Model<1> model = [](const std::array<Dual, 1>& q, double L) { return Dual(-1.0) / (Dual(L) + q[0]); };
    const Feasible<1> feasible = [&](const std::array<double, 1>& q) { return shift_admissible(q[0], cloud); };
    std::array<double, 1> a{num / den};
    if (feasible(a)) a = levenberg_marquardt<1>(model, feasible, a, cloud, 10);
    return make_fit(LogarithmicFamily{a[0]}, 1, cloud, tol, feasible(a));
}

FamilyFit fit_power_shift(const std::vector<CloudPoint>& cloud, double tol)
{
    const Model<2> model = [](const std::array<Dual, 2>& q, double L) { return q[0] / (Dual(L) + q[1]); };
    const Feasible<2> feasible = [&](const std::array<double, 2>& q) { return shift_admissible(q[1], cloud); };
    std::optional<FamilyFit> best;
    for (double a0 : {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
        if (!shift_admissible(a0, cloud)) continue;
        // Optimal gamma for the starting shift.
        double num = 0.0, den = 0.0;
        for (const auto& p : cloud) {
            const double w = 1.0 / ((1.0 + std::abs(p.f)) * (1.0 + std::abs(p.f)));
            const double g = 1.0 / (p.L + a0);
            num += w * p.f * g;
            den += w * g * g;
        }
        const auto q = levenberg_marquardt<2>(model, feasible, {num / den, a0}, cloud);
        const bool in_family = std::abs(q[0]) > 1e-9 && std::abs(q[0] + 1.0) > 1e-9;
        FamilyFit fit = make_fit(PowerShiftFamily{q[0], q[1]}, 2, cloud, tol, feasible(q) && in_family);
        if (fit.valid && (!best || fit.residual < best->residual)) best = fit;
    }
    return best ? *best : make_fit(PowerShiftFamily{}, 2, cloud, tol, false);
}

FamilyFit fit_moebius(const std::vector<CloudPoint>& cloud, double tol)
{
    // With c != 0 the family is f = -2 / (L + r), r = d/c: one effective
    // parameter; c = 0 degenerates to f = 0, covered by Constant.
    const Model<1> model = [](const std::array<Dual, 1>& q, double L) { return Dual(-2.0) / (Dual(L) + q[0]); };
    const Feasible<1> feasible = [&](const std::array<double, 1>& q) { return shift_admissible(q[0], cloud); };
    std::vector<double> starts{0.5, -0.5, 1.0, -1.0, 2.0, -2.0};
    std::vector<double> guesses;
    for (const auto& p : cloud)
        if (p.f != 0.0) guesses.push_back(-2.0 / p.f - p.L);
    if (!guesses.empty()) starts.insert(starts.begin(), median(guesses));
    std::optional<FamilyFit> best;
    for (double r0 : starts) {
        if (!shift_admissible(r0, cloud)) continue;
        const auto q = levenberg_marquardt<1>(model, feasible, {r0}, cloud);
        FamilyFit fit = make_fit(normalize(MoebiusFamily{1.0, q[0]}), 1, cloud, tol, feasible(q));
        if (fit.valid && (!best || fit.residual < best->residual)) best = fit;
    }
    return best ? *best : make_fit(MoebiusFamily{}, 1, cloud, tol, false);
}

} // namespace

FunctionalFit classify(const std::vector<CloudPoint>& cloud, double tol_fit)
{
    if (cloud.empty()) throw InsufficientSamples("cannot classify an empty cloud");
    FunctionalFit out;
    out.candidates = {fit_constant(cloud, tol_fit), fit_power_shift(cloud, tol_fit), fit_logarithmic(cloud, tol_fit),
                      fit_moebius(cloud, tol_fit)};

    const FamilyFit* chosen = nullptr;
    for (const auto& c : out.candidates) {
        if (!c.valid || c.residual > tol_fit) continue;
        // Strict comparison keeps the earlier family on ties.
        if (!chosen || c.penalized < chosen->penalized) chosen = &c;
    }
    if (!chosen) {
        out.chosen = TabulatedFamily{cloud};
        out.residual = 0.0;
        return out;
    }
    out.chosen = chosen->params;
    out.residual = chosen->residual;
    if (const auto* ps = std::get_if<PowerShiftFamily>(&out.chosen); ps && std::abs(ps->a) <= 1e-6) {
        const double p = 1.0 / (1.0 + ps->gamma);
        const double rounded = std::round(p);
        if (rounded >= 2.0 && std::abs(p - rounded) <= 1e-6) out.homogeneous_root = HomogeneousRootFamily{rounded};
    }
    return out;
}

} // namespace lagdeform
