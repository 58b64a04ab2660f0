#include "lagdeform/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lagdeform/errors.hpp"

namespace lagdeform {

void ConditionReport::add(double residual, const PhasePoint& p, int component)
{
    sum_ += residual;
    ++terms_;
    if (!worst || residual > max_residual || std::isnan(residual)) {
        max_residual = std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual;
        worst = Worst{p, max_residual, component};
    }
}

void ConditionReport::close()
{
    mean_residual = terms_ ? sum_ / static_cast<double>(terms_) : 0.0;
    pass = max_residual <= tolerance;
}

// ---------------------------------------------------------------------------

LagrangeSystem::LagrangeSystem(SemiSpray S, ScalarField L, std::optional<SemiBasicForm> sigma)
    : S_(std::move(S)), L_(std::move(L))
{
    if (S_.n != L_.n) throw DimensionMismatch("spray and Lagrangian dimensions differ");
    if (static_cast<int>(S_.G.size()) != S_.n) throw DimensionMismatch("spray has wrong number of coefficients");
    SL_ = spray_apply(S_, L_);
    CL_ = liouville_apply(L_);
    EL_ = {L_.n, CL_.expr - L_.expr};
    SEL_ = spray_apply(S_, EL_);
    dJL_ = vertical_differential(L_);
    delta_ = lagrange_differential(S_, L_);
    if (sigma) {
        if (sigma->n != S_.n || static_cast<int>(sigma->components.size()) != S_.n)
            throw DimensionMismatch("sigma must have one component per coordinate");
        sigma_ = std::move(*sigma);
        sigma_supplied_ = true;
    } else {
        sigma_ = delta_;
    }

    const int n = S_.n;
    std::vector<Expression> out{L_.expr, SL_.expr, CL_.expr, EL_.expr, SEL_.expr};
    for (int i = 0; i < n; ++i) out.push_back(partial(L_.expr, x_name(i)));
    for (const auto& c : dJL_.components) out.push_back(c);
    for (const auto& c : delta_.components) out.push_back(c);
    for (const auto& c : sigma_.components) out.push_back(c);
    const auto g = fiber_hessian(L_);
    for (const auto& row : g)
        for (const auto& e : row) out.push_back(e);
    program_ = Program(out, chart_variables(n));
}

Guards LagrangeSystem::theorem_guards() const
{
    Guards g{{SL_.expr, CL_.expr}, {L_.expr, SEL_.expr}};
    for (const auto& c : sigma_.components) g.evaluable.push_back(c);
    for (const auto& c : delta_.components) g.evaluable.push_back(c);
    return g;
}

Guards LagrangeSystem::sigma_guards() const
{
    Guards g{{CL_.expr}, {L_.expr, SEL_.expr}};
    for (const auto& c : sigma_.components) g.evaluable.push_back(c);
    return g;
}

bool LagrangeSystem::try_eval(const PhasePoint& p, PointValues& v) const
{
    const auto n = static_cast<std::size_t>(S_.n);
    std::vector<double> buf(program_.output_count());
    if (!program_.try_run(p.flat(), buf)) return false;
    auto it = buf.begin();
    v.L = *it++;
    v.SL = *it++;
    v.CL = *it++;
    v.EL = *it++;
    v.SEL = *it++;
    auto take = [&](std::vector<double>& dst, std::size_t count) {
        dst.assign(it, it + static_cast<long>(count));
        it += static_cast<long>(count);
    };
    take(v.Lx, n);
    take(v.Ly, n);
    take(v.defect, n);
    take(v.sigma, n);
    take(v.hessian, n * n);
    return true;
}

PointValues LagrangeSystem::eval(const PhasePoint& p) const
{
    PointValues v;
    if (!try_eval(p, v)) {
        // Re-run through the throwing path to name the failing subexpression.
        std::vector<double> buf(program_.output_count());
        program_.run(p.flat(), buf);
    }
    return v;
}

// ---------------------------------------------------------------------------

double f_raw(const PointValues& v) { return -v.SEL / (v.SL * v.CL); }

double f_raw(const SemiSpray& S, const ScalarField& L, const PhasePoint& p, double guard)
{
    const LagrangeSystem sys(S, L);
    const PointValues v = sys.eval(p);
    if (!(std::abs(v.SL) > guard)) throw GuardViolation("|S(L)| = " + std::to_string(std::abs(v.SL)) + " below guard");
    if (!(std::abs(v.CL) > guard)) throw GuardViolation("|C(L)| = " + std::to_string(std::abs(v.CL)) + " below guard");
    return f_raw(v);
}

ConditionReport check_sigma_condition(const LagrangeSystem& sys, const SamplePlan& plan, double tol)
{
    ConditionReport rep;
    rep.id = "sigma_condition";
    rep.tolerance = tol;
    const SampleSet set = draw_samples(sys.dim(), plan, sys.sigma_guards());
    rep.accepted = set.points.size();
    rep.rejected = set.rejected;
    PointValues v;
    for (const auto& p : set.points) {
        if (!sys.try_eval(p, v)) {
            ++rep.rejected;
            --rep.accepted;
            continue;
        }
        const double k = v.SEL / v.CL;
        for (int i = 0; i < sys.dim(); ++i) {
            const auto ui = static_cast<std::size_t>(i);
            rep.add(std::abs(v.sigma[ui] - k * v.Ly[ui]) / (1.0 + std::abs(v.sigma[ui])), p, i);
        }
    }
    rep.close();
    return rep;
}

ConditionReport check_sigma_condition(const SemiSpray& S, const ScalarField& L, const SemiBasicForm& sigma,
                                      const SamplePlan& plan, double tol)
{
    return check_sigma_condition(LagrangeSystem(S, L, sigma), plan, tol);
}

ConditionReport check_sigma_consistency(const LagrangeSystem& sys, const SamplePlan& plan, double tol)
{
    ConditionReport rep;
    rep.id = "sigma_consistency";
    rep.tolerance = tol;
    Guards guards{{}, {sys.lagrangian().expr}};
    for (const auto& c : sys.sigma().components) guards.evaluable.push_back(c);
    for (const auto& c : sys.defect().components) guards.evaluable.push_back(c);
    const SampleSet set = draw_samples(sys.dim(), plan, guards);
    rep.accepted = set.points.size();
    rep.rejected = set.rejected;
    PointValues v;
    for (const auto& p : set.points) {
        if (!sys.try_eval(p, v)) continue;
        for (int i = 0; i < sys.dim(); ++i) {
            const auto ui = static_cast<std::size_t>(i);
            rep.add(std::abs(v.sigma[ui] - v.defect[ui]) / (1.0 + std::abs(v.defect[ui])), p, i);
        }
    }
    rep.close();
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

// Moves q onto the level set {L = target} by Newton steps along grad L.
bool project_to_level(const LagrangeSystem& sys, double target, PhasePoint& q, PointValues& v)
{
    const int n = sys.dim();
    for (int iter = 0; iter < 40; ++iter) {
        if (!sys.try_eval(q, v)) return false;
        const double diff = v.L - target;
        if (std::abs(diff) <= 1e-13 * (1.0 + std::abs(target))) return true;
        double g2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            g2 += v.Lx[ui] * v.Lx[ui] + v.Ly[ui] * v.Ly[ui];
        }
        if (!(g2 > 0.0) || !std::isfinite(g2)) return false;
        const double step = diff / g2;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            q.x[ui] -= step * v.Lx[ui];
            q.y[ui] -= step * v.Ly[ui];
        }
    }
    return false;
}

} // namespace

DependenceResult functional_dependence_test(const LagrangeSystem& sys, const SamplePlan& plan, double tol)
{
    DependenceResult res;
    const int n = sys.dim();
    const SampleSet set = draw_samples(n, plan, sys.theorem_guards());
    res.accepted = set.points.size();
    res.rejected = set.rejected;
    if (set.points.size() < 8)
        throw InsufficientSamples("functional dependence needs at least 8 accepted points, got " +
                                  std::to_string(set.points.size()));

    std::vector<PointValues> values(set.points.size());
    std::vector<double> fs(set.points.size());
    std::vector<double> abs_f;
    for (std::size_t k = 0; k < set.points.size(); ++k) {
        values[k] = sys.eval(set.points[k]);
        fs[k] = f_raw(values[k]);
        abs_f.push_back(std::abs(fs[k]));
    }
    std::nth_element(abs_f.begin(), abs_f.begin() + static_cast<long>(abs_f.size() / 2), abs_f.end());
    res.tolerance = tol * (1.0 + abs_f[abs_f.size() / 2]);

    const auto names = chart_variables(n);
    std::vector<double> width;
    for (const auto& name : names) width.push_back(plan.box.at(name).hi - plan.box.at(name).lo);

    constexpr int kCompanions = 2;
    constexpr int kAttempts = 6;
    for (std::size_t k = 0; k < set.points.size(); ++k) {
        const PhasePoint& p = set.points[k];
        UniformStream rng(plan.seed * 0x2545f4914f6cdd1dULL + k + 1);
        double spread = 0.0;
        int members = 1;
        for (int c = 0; c < kCompanions; ++c) {
            for (int attempt = 0; attempt < kAttempts; ++attempt) {
                PhasePoint q = p;
                const double scale = 0.05 / (1 << (attempt / 2));
                for (std::size_t i = 0; i < names.size(); ++i) {
                    const double delta = scale * width[i] * rng.next(-1.0, 1.0);
                    if (i < static_cast<std::size_t>(n))
                        q.x[i] += delta;
                    else
                        q.y[i - static_cast<std::size_t>(n)] += delta;
                }
                PointValues vq;
                if (!project_to_level(sys, values[k].L, q, vq)) continue;
                if (!plan.contains(q)) continue;
                if (!(std::abs(vq.SL) > plan.guard && std::abs(vq.CL) > plan.guard)) continue;
                const double fq = f_raw(vq);
                if (!std::isfinite(fq)) continue;
                const double d = std::abs(fq - fs[k]);
                if (d > spread) spread = d;
                ++members;
                break;
            }
        }
        if (members >= 2) {
            ++res.groups_checked;
            if (spread > res.max_spread || std::isnan(spread)) {
                res.max_spread = spread;
                if (spread > res.tolerance) res.witness = p;
            }
        }
    }

    res.dependent = res.groups_checked * 2 >= set.points.size() && res.max_spread <= res.tolerance;

    std::vector<CloudPoint> cloud;
    for (std::size_t k = 0; k < set.points.size(); ++k) cloud.push_back({values[k].L, fs[k]});
    std::sort(cloud.begin(), cloud.end(), [](const CloudPoint& a, const CloudPoint& b) { return a.L < b.L; });
    for (const auto& c : cloud)
        if (res.cloud.empty() || c.L > res.cloud.back().L) res.cloud.push_back(c);
    return res;
}

// ---------------------------------------------------------------------------

int symmetric_rank(const std::vector<double>& m, int n)
{
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = m[static_cast<std::size_t>(i * n + j)];
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd s = solver.eigenvalues().cwiseAbs();
    const double largest = s.maxCoeff();
    if (!(largest > 0.0)) return 0;
    int rank = 0;
    for (int i = 0; i < n; ++i)
        if (s(i) > kRankCutoff * largest) ++rank;
    return rank;
}

HessianReport hessian_report(const LagrangeSystem& sys, const PhiJet& phi, const SamplePlan& plan)
{
    HessianReport rep;
    const int n = sys.dim();
    const auto un = static_cast<std::size_t>(n);
    Guards guards{{}, {sys.lagrangian().expr}};
    const SampleSet set = draw_samples(n, plan, guards);
    rep.min_rank = n;
    rep.max_rank = 0;
    PointValues v;
    std::vector<double> g(un * un);
    for (const auto& p : set.points) {
        if (!sys.try_eval(p, v)) continue;
        double d1 = 1.0, d2 = 0.0;
        if (phi) {
            try {
                const auto jet = phi(v.L);
                d1 = jet[1];
                d2 = jet[2];
            } catch (const Error&) {
                continue;
            }
        }
        for (std::size_t i = 0; i < un; ++i)
            for (std::size_t j = 0; j < un; ++j) {
                g[i * un + j] = d2 * v.Ly[i] * v.Ly[j] + d1 * v.hessian[i * un + j];
                rep.max_entry = std::max(rep.max_entry, std::abs(g[i * un + j]));
            }
        const int r = symmetric_rank(g, n);
        rep.min_rank = std::min(rep.min_rank, r);
        rep.max_rank = std::max(rep.max_rank, r);
        ++rep.points;
    }
    if (rep.points == 0) rep.min_rank = 0;
    rep.nontrivial = rep.max_entry > kTrivialEntry;
    return rep;
}

// ---------------------------------------------------------------------------

HomogeneousReport check_homogeneous(const LagrangeSystem& sys, const SamplePlan& plan, double tol)
{
    HomogeneousReport rep;
    const int n = sys.dim();
    const auto pL = homogeneity_degree(sys.lagrangian(), plan);
    const auto pS = homogeneity_degree(sys.sigma(), plan);
    rep.spray = homogeneity_degree(sys.spray(), plan).has_value();
    auto show = [](const std::optional<double>& p) { return p ? format_number(*p) : std::string("none"); };
    if (!pL || !pS || std::abs(*pL - *pS) > 1e-6)
        throw NotHomogeneous("L and sigma are not homogeneous of a common order (L: " + show(pL) +
                             ", sigma: " + show(pS) + ")");
    if (!rep.spray) throw NotHomogeneous("the semi-spray is not homogeneous of degree 2");
    rep.degree_L = *pL;
    rep.degree_sigma = *pS;
    if (*pL <= 1.0 + 1e-9)
        throw NotHomogeneous("order p = " + format_number(*pL) + " <= 1: E_L = 0 forces sigma = 0");

    const double p = *pL;
    rep.wedge.id = "theorem2_wedge";
    rep.wedge.tolerance = tol;
    Guards guards{{sys.C_of_L().expr}, {sys.lagrangian().expr}};
    for (const auto& c : sys.sigma().components) guards.evaluable.push_back(c);
    const SampleSet set = draw_samples(n, plan, guards);
    rep.wedge.accepted = set.points.size();
    rep.wedge.rejected = set.rejected;
    PointValues v;
    const auto un = static_cast<std::size_t>(n);
    double max_entry = 0.0;
    for (const auto& pt : set.points) {
        if (!sys.try_eval(pt, v)) continue;
        if (!(v.L > 0.0)) throw NotHomogeneous("L must be positive on the sampled region");
        for (std::size_t i = 0; i < un; ++i)
            for (std::size_t j = i + 1; j < un; ++j) {
                const double a = v.Ly[i] * v.sigma[j];
                const double b = v.Ly[j] * v.sigma[i];
                rep.wedge.add(std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b)), pt,
                              static_cast<int>(i * un + j));
            }
        for (std::size_t i = 0; i < un; ++i)
            for (std::size_t j = 0; j < un; ++j)
                max_entry = std::max(max_entry,
                                     std::abs((1.0 - p) / p * v.Ly[i] * v.Ly[j] + v.L * v.hessian[i * un + j]));
    }
    if (n == 1) rep.wedge.notes.push_back("one-dimensional: the wedge condition is vacuous");
    rep.wedge.close();
    rep.nontrivial = max_entry > kTrivialEntry;
    rep.root_p = p;
    return rep;
}

// ---------------------------------------------------------------------------

DissipativeReport check_dissipative(const LagrangeSystem& sys, const ScalarField& D, const SamplePlan& plan,
                                    double tol)
{
    DissipativeReport rep;
    const int n = sys.dim();
    if (D.n != n) throw DimensionMismatch("dissipation function dimension differs from the spray");
    const auto dJD = vertical_differential(D);
    const auto CD = liouville_apply(D);
    std::vector<Expression> out{D.expr, CD.expr};
    for (const auto& c : dJD.components) out.push_back(c);
    const Program program(out, chart_variables(n));

    rep.defect_matches.id = "dissipative_defect";
    rep.energy_balance.id = "dissipative_energy_balance";
    rep.defect_matches.tolerance = rep.energy_balance.tolerance = tol;

    const auto degree = homogeneity_degree(D, plan);
    rep.rayleigh_applicable = degree && std::abs(*degree - 2.0) <= 1e-9;
    if (rep.rayleigh_applicable) {
        rep.rayleigh_balance = ConditionReport{};
        rep.rayleigh_balance->id = "rayleigh_balance";
        rep.rayleigh_balance->tolerance = tol;
    }

    Guards guards{{}, {sys.lagrangian().expr, sys.S_of_energy().expr}};
    for (const auto& e : out) guards.evaluable.push_back(e);
    for (const auto& c : sys.defect().components) guards.evaluable.push_back(c);
    const SampleSet set = draw_samples(n, plan, guards);
    rep.defect_matches.accepted = rep.energy_balance.accepted = set.points.size();
    rep.defect_matches.rejected = rep.energy_balance.rejected = set.rejected;

    rep.dissipation_negative = true;
    PointValues v;
    std::vector<double> dv(out.size());
    for (const auto& p : set.points) {
        if (!sys.try_eval(p, v) || !program.try_run(p.flat(), dv)) continue;
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            rep.defect_matches.add(std::abs(v.defect[ui] - dv[2 + ui]) / (1.0 + std::abs(v.defect[ui])), p, i);
        }
        rep.energy_balance.add(std::abs(v.SEL - dv[1]) / (1.0 + std::abs(v.SEL)), p);
        if (rep.rayleigh_balance) rep.rayleigh_balance->add(std::abs(v.SEL - 2.0 * dv[0]) / (1.0 + std::abs(v.SEL)), p);
        if (!(dv[0] < 0.0)) rep.dissipation_negative = false;
    }
    rep.defect_matches.close();
    rep.energy_balance.close();
    if (rep.rayleigh_balance) rep.rayleigh_balance->close();
    return rep;
}

} // namespace lagdeform
