#include "lagdeform/pipeline.hpp"

#include <cmath>
#include <limits>

#include "lagdeform/errors.hpp"

namespace lagdeform {

std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::DeformableRegular: return "DeformableRegular";
    case Verdict::DeformableSingular: return "DeformableSingular";
    case Verdict::NotOfTheoremForm: return "NotOfTheoremForm";
    case Verdict::ConservativeAffineOnly: return "ConservativeAffineOnly";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

int exit_code(Verdict v)
{
    switch (v) {
    case Verdict::DeformableRegular:
    case Verdict::DeformableSingular:
    case Verdict::ConservativeAffineOnly: return 0;
    case Verdict::NotOfTheoremForm: return 1;
    case Verdict::Inconclusive: return 2;
    }
    return 2;
}

PhasePoint default_start(const ProblemSpec& spec)
{
    SamplePlan plan = spec.plan;
    plan.count = 1;
    return draw_samples(spec.dim, plan, Guards{{}, {spec.lagrangian.expr}}).points.front();
}

namespace {

SemiBasicForm zero_form(int n) { return make_form(std::vector<Expression>(static_cast<std::size_t>(n))); }

void run_theorem2(const LagrangeSystem& sys, const ProblemSpec& spec, ReportDocument& doc)
{
    try {
        auto rep = check_homogeneous(sys, spec.plan, spec.tolerances.identity);
        if (spec.homogeneity && std::abs(*spec.homogeneity - rep.degree_L) > 1e-6)
            doc.diagnostics.push_back("declared homogeneity " + format_number(*spec.homogeneity) +
                                      " differs from the measured degree " + format_number(rep.degree_L));
        // check_homogeneous has already required L > 0 at every sample.
        if (rep.wedge.pass && rep.nontrivial)
            doc.theorem2.deformation = Deformation(ClosedForm{HomogeneousRootFamily{rep.root_p}, 1.0, 0.0, 1,
                                                              {0.0, std::numeric_limits<double>::infinity()}});
        doc.theorem2.report = std::move(rep);
    } catch (const NotHomogeneous& e) {
        doc.theorem2.error = e.what();
    } catch (const TooManyRejections& e) {
        doc.theorem2.error = e.what();
    }
}

void run_trajectory(const ProblemSpec& spec, const PipelineOptions& opts, ReportDocument& doc)
{
    TrajectorySummary sum;
    sum.step = opts.step;
    sum.horizon = opts.horizon;
    try {
        sum.start = default_start(spec);
        IntegratorConfig cfg{opts.step, opts.horizon, sum.start, spec.plan.box};
        const Trajectory traj = integrate_geodesic(spec.spray, cfg);
        sum.states = traj.states.size();
        sum.truncated = traj.truncated;
        sum.warnings = traj.warnings;
        const DeformedLagrangian raw(spec.lagrangian);
        sum.energy_L = energy_along(traj, raw);
        if (traj.states.size() >= 4) sum.el_residual_L = el_residual_along(traj, raw);
        if (doc.deformation) {
            try {
                const DeformedLagrangian phi(spec.lagrangian, *doc.deformation);
                sum.energy_phi = energy_along(traj, phi);
                if (traj.states.size() >= 4) sum.el_residual_phi = el_residual_along(traj, phi);
            } catch (const OutOfInterval& e) {
                sum.warnings.push_back(std::string("phi(L) not evaluable along the trajectory: ") + e.what());
            }
        }
        if (spec.dissipation) sum.dissipation = dissipation_along(traj, spec.spray, spec.lagrangian, *spec.dissipation);
    } catch (const Error& e) {
        sum.warnings.push_back(std::string("trajectory stage: ") + e.what());
    }
    doc.trajectory = std::move(sum);
}

} // namespace

ReportDocument run_pipeline(const ProblemSpec& spec, const PipelineOptions& opts)
{
    ReportDocument doc;
    doc.problem = spec;
    const int n = spec.dim;
    const Tolerances& tol = spec.tolerances;
    const LagrangeSystem sys(spec.spray, spec.lagrangian, spec.sigma);

    try {
        doc.sigma_condition = check_sigma_condition(sys, spec.plan, tol.identity);
        doc.theorem_form = doc.sigma_condition.pass;
        if (sys.sigma_supplied()) {
            doc.sigma_consistency = check_sigma_consistency(sys, spec.plan, tol.identity);
            if (!doc.sigma_consistency->pass) {
                doc.diagnostics.push_back("supplied sigma disagrees with delta_S L; the theorem conditions are "
                                          "evaluated on delta_S L");
                doc.defect_condition = check_sigma_condition(LagrangeSystem(spec.spray, spec.lagrangian),
                                                             spec.plan, tol.identity);
                doc.defect_condition->id = "defect_condition";
                doc.theorem_form = doc.defect_condition->pass;
            }
        }
    } catch (const TooManyRejections& e) {
        doc.diagnostics.push_back(std::string("sigma condition: C(L) vanishes on the box: ") + e.what());
        doc.verdict = Verdict::Inconclusive;
        return doc;
    }

    if (spec.dissipation) {
        try {
            doc.dissipative = check_dissipative(sys, *spec.dissipation, spec.plan, tol.identity);
        } catch (const Error& e) {
            doc.diagnostics.push_back(std::string("dissipative checks: ") + e.what());
        }
    }
    run_theorem2(sys, spec, doc);

    try {
        doc.dependence = functional_dependence_test(sys, spec.plan, tol.dependence);
    } catch (const TooManyRejections& e) {
        // S(L) = 0 (or C(L) = 0) on the samples: only the affine case remains.
        doc.diagnostics.push_back(std::string("S(L) or C(L) vanishes on the samples: ") + e.what());
        const LagrangeSystem conservative(spec.spray, spec.lagrangian, zero_form(n));
        const auto rep = check_sigma_consistency(conservative, spec.plan, tol.identity);
        if (rep.pass) {
            doc.deformation = synthesize(ConstantFamily{0.0}, {0.0, 0.0});
            doc.verdict = Verdict::ConservativeAffineOnly;
            doc.diagnostics.push_back("delta_S L = 0: L is a Lagrangian of S; phi(t) = a t + b");
        } else {
            doc.verdict = Verdict::Inconclusive;
            doc.diagnostics.push_back("delta_S L != 0 with S(L) = 0: max residual " +
                                      format_number(rep.max_residual));
        }
        if (opts.trajectory) run_trajectory(spec, opts, doc);
        return doc;
    } catch (const InsufficientSamples& e) {
        doc.diagnostics.push_back(e.what());
        doc.verdict = Verdict::Inconclusive;
        return doc;
    }

    const auto& cloud = doc.dependence->cloud;
    if (doc.dependence->dependent) {
        doc.fit = classify(cloud, tol.classification);
        try {
            doc.deformation = synthesize(doc.fit->chosen, {cloud.front().L, cloud.back().L});
        } catch (const DomainConflict& e) {
            doc.diagnostics.push_back(std::string("synthesis: ") + e.what());
        } catch (const InsufficientSamples& e) {
            doc.diagnostics.push_back(std::string("synthesis: ") + e.what());
        }
    } else {
        doc.diagnostics.push_back("f_raw is not a function of L");
    }

    doc.hessian_L = hessian_report(sys, {}, spec.plan);
    if (doc.deformation) {
        doc.verify = verify_deformed_el(spec.spray, spec.lagrangian, *doc.deformation, spec.plan, tol.identity);
        doc.hessian_phi = deformed_hessian(sys, *doc.deformation, spec.plan);
    }

    if (!doc.theorem_form || !doc.dependence->dependent) {
        doc.verdict = Verdict::NotOfTheoremForm;
    } else if (!doc.deformation || !doc.verify) {
        doc.verdict = Verdict::Inconclusive;
    } else if (!doc.hessian_phi->nontrivial) {
        doc.verdict = Verdict::NotOfTheoremForm;
        doc.diagnostics.push_back("the fiber Hessian of phi(L) vanishes");
    } else if (!doc.verify->pass) {
        doc.verdict = Verdict::Inconclusive;
        doc.diagnostics.push_back("conditions hold on the samples but delta_S phi(L) = 0 fails at tolerance");
    } else {
        doc.verdict = doc.hessian_phi->min_rank == n ? Verdict::DeformableRegular : Verdict::DeformableSingular;
    }

    if (opts.trajectory) run_trajectory(spec, opts, doc);
    return doc;
}

} // namespace lagdeform
