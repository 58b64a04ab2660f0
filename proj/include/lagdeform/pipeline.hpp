#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lagdeform/classify.hpp"
#include "lagdeform/deform.hpp"
#include "lagdeform/dynamics.hpp"
#include "lagdeform/problem.hpp"
#include "lagdeform/theorem.hpp"

namespace lagdeform {

enum class Verdict { DeformableRegular, DeformableSingular, NotOfTheoremForm, ConservativeAffineOnly, Inconclusive };

std::string verdict_name(Verdict v);
/// 0 Deformable* / ConservativeAffineOnly, 1 NotOfTheoremForm, 2 Inconclusive.
int exit_code(Verdict v);

struct TheoremTwo {
    std::optional<HomogeneousReport> report;
    std::optional<Deformation> deformation; // L^(1/p)
    std::string error;                      // why the pathway does not apply
};

struct TrajectorySummary {
    PhasePoint start;
    double step = 0.0;
    double horizon = 0.0;
    std::size_t states = 0;
    bool truncated = false;
    double el_residual_L = 0.0;
    std::optional<double> el_residual_phi;
    EnergySeries energy_L;
    std::optional<EnergySeries> energy_phi;
    std::optional<DissipationSeries> dissipation;
    std::vector<std::string> warnings;
};

struct ReportDocument {
    ProblemSpec problem;
    ConditionReport sigma_condition;                // on the supplied sigma (or delta_S L)
    std::optional<ConditionReport> sigma_consistency; // supplied sigma against delta_S L
    std::optional<ConditionReport> defect_condition;  // condition on delta_S L when they disagree
    bool theorem_form = false;                       // the condition on delta_S L holds
    std::optional<DependenceResult> dependence;
    std::optional<FunctionalFit> fit;
    std::optional<Deformation> deformation;
    std::optional<VerifyReport> verify;
    std::optional<HessianReport> hessian_L;
    std::optional<HessianReport> hessian_phi;
    TheoremTwo theorem2;
    std::optional<DissipativeReport> dissipative;
    std::optional<TrajectorySummary> trajectory;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> diagnostics;
};

struct PipelineOptions {
    bool trajectory = true;
    double step = 1e-3;
    double horizon = 1.0;
};

/// Runs the full decision pipeline with the spec's seed and tolerances.
ReportDocument run_pipeline(const ProblemSpec& spec, const PipelineOptions& opts = {});

/// First point the plan accepts for L; the default trajectory start.
PhasePoint default_start(const ProblemSpec& spec);

} // namespace lagdeform
