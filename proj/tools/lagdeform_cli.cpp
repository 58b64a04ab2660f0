// lagdeform: decide whether a forced Lagrange system admits a scalar
// deformation phi with delta_S phi(L) = 0, and report on it.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagdeform/dynamics.hpp"
#include "lagdeform/errors.hpp"
#include "lagdeform/pipeline.hpp"
#include "lagdeform/problem.hpp"
#include "lagdeform/report.hpp"

using namespace lagdeform;

namespace {

constexpr int kInputError = 3;

struct CommonArgs {
    std::string problem;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<double> tol;
    std::string format = "text";
    std::string out;
};

struct GeodesicArgs {
    std::vector<double> x0;
    std::vector<double> y0;
    double step = 1e-3;
    double horizon = 1.0;
    std::string csv;
};

void add_common(CLI::App* cmd, CommonArgs& a)
{
    cmd->add_option("--problem", a.problem, "problem file (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", a.seed, "override the sampling seed");
    cmd->add_option("--samples", a.samples, "override the sample count")->check(CLI::Range(8ul, 100000000ul));
    cmd->add_option("--tol", a.tol, "override the identity tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--format", a.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", a.out, "write the report here instead of stdout");
}

ProblemSpec load(const CommonArgs& a)
{
    ProblemSpec spec = load_problem(a.problem);
    if (a.seed) spec.plan.seed = *a.seed;
    if (a.samples) spec.plan.count = *a.samples;
    if (a.tol) spec.tolerances.identity = *a.tol;
    return spec;
}

void write(const CommonArgs& a, const std::string& text)
{
    if (a.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(a.out);
    if (!f) throw SchemaError("--out", "cannot write " + a.out);
    f << text;
}

int run_report(const CommonArgs& a, ReportStage stage)
{
    const ProblemSpec spec = load(a);
    PipelineOptions opts;
    opts.trajectory = stage == ReportStage::Full;
    const ReportDocument doc = run_pipeline(spec, opts);
    write(a, emit_report(doc, a.format == "json" ? ReportFormat::Json : ReportFormat::Text, stage));
    return exit_code(doc.verdict);
}

int run_geodesic(const CommonArgs& a, const GeodesicArgs& g)
{
    const ProblemSpec spec = load(a);
    PipelineOptions opts;
    opts.trajectory = false;
    const ReportDocument doc = run_pipeline(spec, opts);

    PhasePoint start = default_start(spec);
    const auto n = static_cast<std::size_t>(spec.dim);
    if (!g.x0.empty()) {
        if (g.x0.size() != n) throw SchemaError("--x0", "expected " + std::to_string(n) + " values");
        start.x = g.x0;
    }
    if (!g.y0.empty()) {
        if (g.y0.size() != n) throw SchemaError("--y0", "expected " + std::to_string(n) + " values");
        start.y = g.y0;
    }
    const Trajectory traj = integrate_geodesic(spec.spray, {g.step, g.horizon, start, spec.plan.box});
    const DeformedLagrangian raw(spec.lagrangian);
    const DeformedLagrangian deformed(spec.lagrangian, doc.deformation);

    if (!g.csv.empty()) {
        std::ofstream f(g.csv);
        if (!f) throw SchemaError("--csv", "cannot write " + g.csv);
        write_trajectory_csv(f, traj, raw, deformed);
    }

    const auto eL = energy_along(traj, raw);
    std::ostringstream out;
    if (a.format == "json") {
        out << "{\n  \"states\": " << traj.states.size() << ",\n  \"truncated\": " << (traj.truncated ? "true" : "false")
            << ",\n  \"energy_L_drift\": " << format_number(eL.drift);
        if (doc.deformation)
            out << ",\n  \"energy_phi_drift\": " << format_number(energy_along(traj, deformed).drift);
        out << ",\n  \"verdict\": \"" << verdict_name(doc.verdict) << "\"\n}\n";
    } else {
        out << "states: " << traj.states.size() << (traj.truncated ? " (truncated)" : "") << '\n';
        const auto& last = traj.states.back();
        out << "final t: " << format_number(traj.times.back()) << '\n';
        for (std::size_t i = 0; i < n; ++i) out << x_name(static_cast<int>(i)) << ": " << format_number(last.x[i]) << '\n';
        for (std::size_t i = 0; i < n; ++i) out << y_name(static_cast<int>(i)) << ": " << format_number(last.y[i]) << '\n';
        out << "E_L drift: " << format_number(eL.drift) << '\n';
        if (doc.deformation)
            out << "E_phi(L) drift: " << format_number(energy_along(traj, deformed).drift) << "  ("
                << doc.deformation->describe() << ")\n";
        for (const auto& w : traj.warnings) out << "warning: " << w << '\n';
        out << "verdict: " << verdict_name(doc.verdict) << '\n';
    }
    write(a, out.str());
    return exit_code(doc.verdict);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Scalar deformations of forced Lagrange systems"};
    app.require_subcommand(1);

    CommonArgs args;
    GeodesicArgs geo;
    struct Sub {
        const char* name;
        const char* help;
        ReportStage stage;
    };
    const Sub subs[] = {
        {"check", "theorem conditions and functional dependence", ReportStage::Check},
        {"classify", "fit the generating function to a deformation family", ReportStage::Classify},
        {"synthesize", "construct phi", ReportStage::Synthesize},
        {"verify", "check delta_S phi(L) = 0 and the deformed Hessian", ReportStage::Verify},
        {"report", "full pipeline including trajectory checks", ReportStage::Full},
    };
    std::vector<std::pair<CLI::App*, ReportStage>> report_cmds;
    for (const auto& s : subs) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, args);
        report_cmds.emplace_back(cmd, s.stage);
    }
    auto* geodesic = app.add_subcommand("geodesic", "integrate a geodesic of the semi-spray");
    add_common(geodesic, args);
    geodesic->add_option("--x0", geo.x0, "initial position");
    geodesic->add_option("--y0", geo.y0, "initial velocity");
    geodesic->add_option("--step", geo.step, "RK4 step")->check(CLI::PositiveNumber);
    geodesic->add_option("--horizon", geo.horizon, "final time")->check(CLI::PositiveNumber);
    geodesic->add_option("--csv", geo.csv, "write the trajectory as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (geodesic->parsed()) return run_geodesic(args, geo);
        for (const auto& [cmd, stage] : report_cmds)
            if (cmd->parsed()) return run_report(args, stage);
    } catch (const SchemaError& e) {
        std::cerr << "lagdeform: " << e.what() << '\n';
        return kInputError;
    } catch (const ParseError& e) {
        std::cerr << "lagdeform: expression " << e.what() << '\n';
        return kInputError;
    } catch (const UndeclaredIdentifier& e) {
        std::cerr << "lagdeform: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "lagdeform: " << e.what() << '\n';
        return 2;
    }
    return kInputError;
}
