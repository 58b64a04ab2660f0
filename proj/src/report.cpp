#include "lagdeform/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace lagdeform {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v)
{
    json out = json::array();
    for (double d : v) out.push_back(num(d));
    return out;
}

json point(const PhasePoint& p) { return json{{"x", numbers(p.x)}, {"y", numbers(p.y)}}; }

json condition(const ConditionReport& r)
{
    json j{{"id", r.id},
           {"accepted", r.accepted},
           {"rejected", r.rejected},
           {"max_residual", num(r.max_residual)},
           {"mean_residual", num(r.mean_residual)},
           {"tolerance", num(r.tolerance)},
           {"pass", r.pass},
           {"notes", r.notes}};
    if (r.worst)
        j["worst"] = {{"point", point(r.worst->point)},
                      {"residual", num(r.worst->residual)},
                      {"component", r.worst->component}};
    return j;
}

json hessian(const HessianReport& h)
{
    return {{"nontrivial", h.nontrivial}, {"min_rank", h.min_rank}, {"max_rank", h.max_rank},
            {"points", h.points},         {"max_entry", num(h.max_entry)}};
}

json family_parameters(const DeformationClass& cls)
{
    return std::visit(overloaded{
                          [](const ConstantFamily& f) { return json{{"gamma", num(f.gamma)}}; },
                          [](const PowerShiftFamily& f) { return json{{"gamma", num(f.gamma)}, {"a", num(f.a)}}; },
                          [](const LogarithmicFamily& f) { return json{{"a", num(f.a)}}; },
                          [](const MoebiusFamily& f) { return json{{"c", num(f.c)}, {"d", num(f.d)}}; },
                          [](const HomogeneousRootFamily& f) { return json{{"p", num(f.p)}}; },
                          [](const TabulatedFamily& f) { return json{{"points", f.points.size()}}; },
                      },
                      cls);
}

json deformation(const Deformation& d)
{
    const Interval dom = d.domain();
    json j{{"description", d.describe()}, {"domain", {num(dom.lo), num(dom.hi)}}};
    if (const auto* c = d.closed_form()) {
        j["kind"] = "closed_form";
        j["family"] = describe(c->cls);
        j["scale"] = num(c->scale);
        j["shift"] = num(c->shift);
        j["branch"] = c->branch;
    } else {
        j["kind"] = "numeric";
        j["nodes"] = d.numeric()->grid.size();
    }
    return j;
}

json energy(const EnergySeries& e)
{
    return {{"drift", num(e.drift)}, {"strictly_decreasing", e.strictly_decreasing},
            {"initial", e.values.empty() ? json(nullptr) : num(e.values.front())},
            {"final", e.values.empty() ? json(nullptr) : num(e.values.back())}};
}

bool at_least(ReportStage stage, ReportStage min) { return static_cast<int>(stage) >= static_cast<int>(min); }

json to_json(const ReportDocument& doc, ReportStage stage)
{
    const ProblemSpec& p = doc.problem;
    json problem{{"name", p.name},
                 {"dim", p.dim},
                 {"params", json::object()},
                 {"spray", p.spray_source},
                 {"lagrangian", p.lagrangian_source},
                 {"box", json::object()},
                 {"sampling", {{"count", p.plan.count}, {"seed", p.plan.seed}, {"guard", num(p.plan.guard)}}},
                 {"tolerances",
                  {{"identity", num(p.tolerances.identity)},
                   {"classification", num(p.tolerances.classification)},
                   {"trajectory", num(p.tolerances.trajectory)},
                   {"dependence", num(p.tolerances.dependence)}}}};
    for (const auto& [k, v] : p.params) problem["params"][k] = num(v);
    for (const auto& [k, v] : p.plan.box) problem["box"][k] = {num(v.lo), num(v.hi)};
    if (p.sigma_source) problem["sigma"] = *p.sigma_source;
    if (p.dissipation_source) problem["dissipation"] = *p.dissipation_source;
    if (p.homogeneity) problem["homogeneity"] = num(*p.homogeneity);

    json j{{"problem", problem},
           {"verdict", verdict_name(doc.verdict)},
           {"exit_code", exit_code(doc.verdict)},
           {"diagnostics", doc.diagnostics},
           {"theorem_form", doc.theorem_form}};
    json conditions{{"sigma_condition", condition(doc.sigma_condition)}};
    if (doc.sigma_consistency) conditions["sigma_consistency"] = condition(*doc.sigma_consistency);
    if (doc.defect_condition) conditions["defect_condition"] = condition(*doc.defect_condition);
    j["conditions"] = conditions;

    if (doc.dependence) {
        const auto& d = *doc.dependence;
        j["dependence"] = {{"dependent", d.dependent},        {"accepted", d.accepted},
                           {"rejected", d.rejected},          {"groups_checked", d.groups_checked},
                           {"max_spread", num(d.max_spread)}, {"tolerance", num(d.tolerance)},
                           {"cloud_points", d.cloud.size()}};
        if (!d.cloud.empty()) j["dependence"]["L_range"] = {num(d.cloud.front().L), num(d.cloud.back().L)};
        if (d.witness) j["dependence"]["witness"] = point(*d.witness);
    }

    json t2{{"applies", doc.theorem2.report.has_value()}};
    if (const auto& r = doc.theorem2.report) {
        t2["degree_L"] = num(r->degree_L);
        t2["degree_sigma"] = num(r->degree_sigma);
        t2["spray"] = r->spray;
        t2["wedge"] = condition(r->wedge);
        t2["nontrivial"] = r->nontrivial;
        t2["root_p"] = num(r->root_p);
    } else {
        t2["reason"] = doc.theorem2.error;
    }
    if (doc.theorem2.deformation) t2["deformation"] = deformation(*doc.theorem2.deformation);
    j["theorem2"] = t2;

    if (const auto& d = doc.dissipative) {
        json dj{{"defect_matches", condition(d->defect_matches)},
                {"energy_balance", condition(d->energy_balance)},
                {"rayleigh_applicable", d->rayleigh_applicable},
                {"dissipation_negative", d->dissipation_negative}};
        if (d->rayleigh_balance) dj["rayleigh_balance"] = condition(*d->rayleigh_balance);
        j["dissipative"] = dj;
    }

    if (at_least(stage, ReportStage::Classify) && doc.fit) {
        json cands = json::array();
        for (const auto& c : doc.fit->candidates)
            cands.push_back({{"family", family_name(c.params)},
                             {"description", describe(c.params)},
                             {"parameters", family_parameters(c.params)},
                             {"residual", num(c.residual)},
                             {"penalized", num(c.penalized)},
                             {"free_parameters", c.parameters},
                             {"valid", c.valid}});
        json fit{{"family", family_name(doc.fit->chosen)},
                 {"description", describe(doc.fit->chosen)},
                 {"parameters", family_parameters(doc.fit->chosen)},
                 {"residual", num(doc.fit->residual)},
                 {"candidates", cands}};
        if (doc.fit->homogeneous_root) fit["homogeneous_root"] = describe(*doc.fit->homogeneous_root);
        j["fit"] = fit;
    }
    if (at_least(stage, ReportStage::Synthesize) && doc.deformation) j["deformation"] = deformation(*doc.deformation);
    if (at_least(stage, ReportStage::Verify)) {
        if (doc.verify)
            j["verify"] = {{"direct", condition(doc.verify->direct)},
                           {"expanded", condition(doc.verify->expanded)},
                           {"agreement", condition(doc.verify->agreement)},
                           {"out_of_interval", doc.verify->out_of_interval},
                           {"pass", doc.verify->pass}};
        json h = json::object();
        if (doc.hessian_L) h["L"] = hessian(*doc.hessian_L);
        if (doc.hessian_phi) h["phi"] = hessian(*doc.hessian_phi);
        j["hessian"] = h;
    }
    if (at_least(stage, ReportStage::Full) && doc.trajectory) {
        const auto& t = *doc.trajectory;
        json tj{{"start", point(t.start)},        {"step", num(t.step)},
                {"horizon", num(t.horizon)},      {"states", t.states},
                {"truncated", t.truncated},       {"el_residual_L", num(t.el_residual_L)},
                {"energy_L", energy(t.energy_L)}, {"warnings", t.warnings}};
        if (t.el_residual_phi) tj["el_residual_phi"] = num(*t.el_residual_phi);
        if (t.energy_phi) tj["energy_phi"] = energy(*t.energy_phi);
        if (t.dissipation) {
            json dj{{"balance", num(t.dissipation->balance)},
                    {"rayleigh", t.dissipation->rayleigh},
                    {"negative", t.dissipation->negative}};
            if (t.dissipation->rayleigh_balance) dj["rayleigh_balance"] = num(*t.dissipation->rayleigh_balance);
            tj["dissipation"] = dj;
        }
        j["trajectory"] = tj;
    }
    return j;
}

std::string g3(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string pass_fail(bool ok) { return ok ? "pass" : "FAIL"; }

void line(std::ostream& out, const ConditionReport& r)
{
    out << r.id << ": " << pass_fail(r.pass) << "  max " << g3(r.max_residual) << "  mean " << g3(r.mean_residual)
        << "  tol " << g3(r.tolerance) << "  (" << r.accepted << " accepted, " << r.rejected << " rejected)\n";
    for (const auto& note : r.notes) out << "  note: " << note << '\n';
}

void rank_line(std::ostream& out, const std::string& what, const HessianReport& h, int n)
{
    out << "hessian " << what << ": ";
    if (!h.nontrivial) {
        out << "trivial (max entry " << g3(h.max_entry) << ")\n";
        return;
    }
    out << "rank " << h.min_rank;
    if (h.max_rank != h.min_rank) out << ".." << h.max_rank;
    out << " of " << n << (h.min_rank == n ? " (regular)" : " (singular)") << " at " << h.points << " points\n";
}

std::string to_text(const ReportDocument& doc, ReportStage stage)
{
    std::ostringstream out;
    const int n = doc.problem.dim;
    out << "problem: " << doc.problem.name << " (n=" << n << ")\n";
    line(out, doc.sigma_condition);
    if (doc.sigma_consistency) line(out, *doc.sigma_consistency);
    if (doc.defect_condition) line(out, *doc.defect_condition);
    if (const auto& d = doc.dissipative) {
        line(out, d->defect_matches);
        line(out, d->energy_balance);
        if (d->rayleigh_balance) line(out, *d->rayleigh_balance);
        out << "dissipation negative on samples: " << (d->dissipation_negative ? "yes" : "no") << '\n';
    }
    if (const auto& d = doc.dependence) {
        out << "dependence: " << (d->dependent ? "f_raw is a function of L" : "f_raw is NOT a function of L")
            << "  (groups " << d->groups_checked << ", max spread " << g3(d->max_spread) << ", tol "
            << g3(d->tolerance) << ")\n";
    }
    if (const auto& r = doc.theorem2.report) {
        out << "theorem2: wedge residual " << (r->wedge.max_residual <= 1e-10 ? "≤" : ">") << " 1e-10 (max "
            << g3(r->wedge.max_residual) << "), degrees L " << format_number(r->degree_L) << ", sigma "
            << format_number(r->degree_sigma);
        if (doc.theorem2.deformation) out << ", " << doc.theorem2.deformation->describe();
        out << '\n';
    } else {
        out << "theorem2: not applicable (" << doc.theorem2.error << ")\n";
    }
    if (at_least(stage, ReportStage::Classify) && doc.fit) {
        out << "family: " << describe(doc.fit->chosen) << "  residual " << g3(doc.fit->residual) << '\n';
        if (doc.fit->homogeneous_root) out << "  equivalently " << describe(*doc.fit->homogeneous_root) << '\n';
    }
    if (at_least(stage, ReportStage::Synthesize) && doc.deformation)
        out << "deformation: " << doc.deformation->describe() << '\n';
    if (at_least(stage, ReportStage::Verify)) {
        if (doc.verify) {
            line(out, doc.verify->direct);
            out << "  expanded form max " << g3(doc.verify->expanded.max_residual) << ", agreement max "
                << g3(doc.verify->agreement.max_residual) << '\n';
        }
        if (doc.hessian_L) rank_line(out, "L", *doc.hessian_L, n);
        if (doc.hessian_phi) rank_line(out, "phi(L)", *doc.hessian_phi, n);
    }
    if (at_least(stage, ReportStage::Full) && doc.trajectory) {
        const auto& t = *doc.trajectory;
        out << "trajectory: " << t.states << " states, h " << g3(t.step) << ", T " << g3(t.horizon)
            << (t.truncated ? " (truncated)" : "") << '\n';
        out << "  E_L drift " << g3(t.energy_L.drift) << ", EL residual of L " << g3(t.el_residual_L) << '\n';
        if (t.energy_phi)
            out << "  E_phi(L) drift " << g3(t.energy_phi->drift) << ", EL residual of phi(L) "
                << g3(t.el_residual_phi.value_or(NAN)) << '\n';
        if (t.dissipation)
            out << "  S(E_L) = C(D) max " << g3(t.dissipation->balance)
                << (t.dissipation->rayleigh_balance
                        ? ", S(E_L) = 2D max " + g3(*t.dissipation->rayleigh_balance)
                        : std::string())
                << '\n';
        for (const auto& w : t.warnings) out << "  warning: " << w << '\n';
    }
    for (const auto& d : doc.diagnostics) out << "diagnostic: " << d << '\n';
    out << "verdict: " << verdict_name(doc.verdict) << '\n';
    return out.str();
}

} // namespace

std::string emit_report(const ReportDocument& doc, ReportFormat format, ReportStage stage)
{
    if (format == ReportFormat::Json) return to_json(doc, stage).dump(2) + "\n";
    return to_text(doc, stage);
}

} // namespace lagdeform
