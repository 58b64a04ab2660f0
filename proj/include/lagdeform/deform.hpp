#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lagdeform/classify.hpp"
#include "lagdeform/theorem.hpp"

namespace lagdeform {

/// phi = scale * phi_family + shift for a closed-form family member. The
/// family formula is taken on the branch (sign of L + a, or side of the
/// Moebius pole) selected at synthesis; `domain` is that whole branch.
struct ClosedForm {
    DeformationClass cls;
    double scale = 1.0;
    double shift = 0.0;
    int branch = 1;  // +1 where L + a > 0 (resp. cL + d of the sign chosen), -1 otherwise
    Interval domain; // open interval; infinite ends allowed
};

/// phi tabulated on a uniform grid: values, first derivatives and the
/// derivative of the first derivative's interpolant at the nodes.
struct NumericForm {
    std::vector<double> grid; // strictly increasing, uniform
    std::vector<double> phi;
    std::vector<double> dphi;  // all > 0
    std::vector<double> slope; // nodal slopes of the monotone cubic for dphi
};

class Deformation {
public:
    explicit Deformation(ClosedForm c) : data_(std::move(c)) {}
    explicit Deformation(NumericForm n) : data_(std::move(n)) {}

    bool is_closed_form() const noexcept { return std::holds_alternative<ClosedForm>(data_); }
    const ClosedForm* closed_form() const noexcept { return std::get_if<ClosedForm>(&data_); }
    const NumericForm* numeric() const noexcept { return std::get_if<NumericForm>(&data_); }

    /// Interval on which phi can be evaluated.
    Interval domain() const;

    /// (phi, phi', phi'') at t. Throws OutOfInterval outside domain().
    std::array<double, 3> jet(double t) const;

    /// phi(L) as an expression; nullopt for numeric deformations.
    std::optional<Expression> compose(const Expression& L) const;

    /// alpha * phi + beta with alpha > 0.
    Deformation affine(double alpha, double beta) const;

    /// "phi(L) = ..." for closed forms, grid summary for numeric ones.
    std::string describe() const;

private:
    std::variant<ClosedForm, NumericForm> data_;
};

/// Closed-form phi of a family member, with scale 1 and shift 0, on the branch
/// containing `range`. Tabulated classes are routed to synthesize_numeric.
/// Throws DomainConflict when `range` meets a singularity of the family.
Deformation synthesize(const DeformationClass& cls, Interval range);

inline constexpr std::size_t kDefaultGrid = 4096;

/// phi = int exp(int f) by trapezoid on an m-point uniform grid over the
/// cloud's L-range, with phi(L_min) = 0 and phi'(L_min) = 1. Throws
/// InsufficientSamples below 8 cloud points.
Deformation synthesize_numeric(const std::vector<CloudPoint>& cloud, std::size_t m = kDefaultGrid);

std::array<double, 3> phi_eval(const Deformation& phi, double t);

/// PhiJet view of a deformation, for hessian_report.
PhiJet jet_of(const Deformation& phi);

/// phi(L), or L itself when no deformation is attached.
class DeformedLagrangian {
public:
    DeformedLagrangian(ScalarField L, std::optional<Deformation> phi = std::nullopt);

    struct Values {
        double value = 0.0;   // phi(L)
        double energy = 0.0;  // phi' C(L) - phi
        std::vector<double> dx; // d phi(L) / dx^i
        std::vector<double> dy; // d phi(L) / dy^i
    };

    int dim() const noexcept { return L_.n; }
    const ScalarField& base() const noexcept { return L_; }
    const std::optional<Deformation>& deformation() const noexcept { return phi_; }

    /// Throws DomainViolation or OutOfInterval.
    Values eval(const PhasePoint& p) const;

    /// phi'' L_i L_j + phi' g_ij, row-major.
    std::vector<double> hessian(const PhasePoint& p) const;

private:
    ScalarField L_;
    std::optional<Deformation> phi_;
    Program program_; // L, C(L), dL/dx, dL/dy, g
};

struct VerifyReport {
    ConditionReport direct;    // S(d phi(L)/dy^i) - d phi(L)/dx^i
    ConditionReport expanded;  // phi'' S(L) L_i + phi' (delta_S L)_i
    ConditionReport agreement; // direct against expanded
    std::size_t out_of_interval = 0;
    bool pass = false;         // direct.pass
};

/// Checks delta_S phi(L) = 0. Residuals are relative to
/// 1 + |phi'' S(L) L_i| + |phi' (delta_S L)_i|.
VerifyReport verify_deformed_el(const SemiSpray& S, const ScalarField& L, const Deformation& phi,
                                const SamplePlan& plan, double tol = kIdentityTolerance);

/// Fiber Hessian of phi(L) at the plan's samples.
HessianReport deformed_hessian(const LagrangeSystem& sys, const Deformation& phi, const SamplePlan& plan);

} // namespace lagdeform
