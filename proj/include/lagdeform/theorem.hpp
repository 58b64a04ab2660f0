#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lagdeform/geometry.hpp"
#include "lagdeform/program.hpp"
#include "lagdeform/sampling.hpp"

namespace lagdeform {

/// Residual statistics of one pointwise condition over a sample set.
struct ConditionReport {
    struct Worst {
        PhasePoint point;
        double residual = 0.0;
        int component = -1;
    };

    std::string id;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    std::optional<Worst> worst;
    bool pass = false;
    std::vector<std::string> notes;

    /// Folds one residual in; the reduction order is the sample order.
    void add(double residual, const PhasePoint& p, int component = -1);
    /// Finalises mean and verdict.
    void close();

private:
    double sum_ = 0.0;
    std::size_t terms_ = 0;
};

/// Values of the objects built from (S, L, sigma) at one phase point.
struct PointValues {
    double L = 0.0;
    double SL = 0.0;  // S(L)
    double CL = 0.0;  // C(L)
    double EL = 0.0;  // E_L
    double SEL = 0.0; // S(E_L)
    std::vector<double> Lx;     // dL/dx^i
    std::vector<double> Ly;     // dL/dy^i = (d_J L)_i
    std::vector<double> defect; // (delta_S L)_i
    std::vector<double> sigma;  // supplied sigma_i, or the defect when absent
    std::vector<double> hessian; // g_ij, row-major
};

/// Symbolic objects derived from a semi-spray, a Lagrangian and an optional
/// covariant force, compiled once for repeated point evaluation.
class LagrangeSystem {
public:
    LagrangeSystem(SemiSpray S, ScalarField L, std::optional<SemiBasicForm> sigma = std::nullopt);

    int dim() const noexcept { return S_.n; }
    const SemiSpray& spray() const noexcept { return S_; }
    const ScalarField& lagrangian() const noexcept { return L_; }
    const ScalarField& S_of_L() const noexcept { return SL_; }
    const ScalarField& C_of_L() const noexcept { return CL_; }
    const ScalarField& energy() const noexcept { return EL_; }
    const ScalarField& S_of_energy() const noexcept { return SEL_; }
    const SemiBasicForm& vertical() const noexcept { return dJL_; }
    const SemiBasicForm& defect() const noexcept { return delta_; }
    const SemiBasicForm& sigma() const noexcept { return sigma_; }
    bool sigma_supplied() const noexcept { return sigma_supplied_; }

    /// Guards realising S(L) != 0, C(L) != 0 and evaluability of L, sigma.
    Guards theorem_guards() const;
    /// Only C(L) != 0 and evaluability; enough for the sigma condition.
    Guards sigma_guards() const;

    bool try_eval(const PhasePoint& p, PointValues& out) const;
    PointValues eval(const PhasePoint& p) const;

private:
    SemiSpray S_;
    ScalarField L_;
    ScalarField SL_, CL_, EL_, SEL_;
    SemiBasicForm dJL_, delta_, sigma_;
    bool sigma_supplied_ = false;
    Program program_;
};

/// -S(E_L) / (S(L) C(L)) at `p`. Throws GuardViolation when |S(L)| or |C(L)|
/// does not exceed `guard`.
double f_raw(const SemiSpray& S, const ScalarField& L, const PhasePoint& p, double guard = 1e-6);
double f_raw(const PointValues& v);

inline constexpr double kIdentityTolerance = 1e-9;

/// sigma = (S(E_L)/C(L)) d_J L, residual |sigma_i - rhs_i| / (1 + |sigma_i|).
ConditionReport check_sigma_condition(const LagrangeSystem& sys, const SamplePlan& plan,
                                      double tol = kIdentityTolerance);
ConditionReport check_sigma_condition(const SemiSpray& S, const ScalarField& L, const SemiBasicForm& sigma,
                                      const SamplePlan& plan, double tol = kIdentityTolerance);

/// A supplied sigma agrees with the Lagrange defect delta_S L.
ConditionReport check_sigma_consistency(const LagrangeSystem& sys, const SamplePlan& plan,
                                        double tol = kIdentityTolerance);

struct CloudPoint {
    double L = 0.0;
    double f = 0.0;
};

struct DependenceResult {
    bool dependent = false;
    std::vector<CloudPoint> cloud; // sorted by strictly increasing L
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t groups_checked = 0; // level-set groups with >= 2 members
    double max_spread = 0.0;        // largest within-group |f - f'|
    double tolerance = 0.0;
    std::optional<PhasePoint> witness; // a point whose level-set partner disagrees
};

inline constexpr double kDependenceTolerance = 1e-6;

/// Tests whether f_raw is a function of L. Each accepted point is grouped
/// with companions on its own level set of L (found by Newton projection
/// along grad L); f_raw must agree within each group to
/// tol * (1 + median |f|). Throws InsufficientSamples below 8 points.
DependenceResult functional_dependence_test(const LagrangeSystem& sys, const SamplePlan& plan,
                                            double tol = kDependenceTolerance);

/// Value and first two derivatives of a deformation at t.
using PhiJet = std::function<std::array<double, 3>(double)>;

struct HessianReport {
    bool nontrivial = false;
    int min_rank = 0;
    int max_rank = 0;
    std::size_t points = 0;
    double max_entry = 0.0;
};

inline constexpr double kRankCutoff = 1e-9;
inline constexpr double kTrivialEntry = 1e-12;

/// Rank of an n x n symmetric matrix: singular values above
/// kRankCutoff * largest.
int symmetric_rank(const std::vector<double>& m, int n);

/// Fiber Hessian of L (phi empty) or of phi(L), through
/// phi'' L_i L_j + phi' g_ij, at the plan's evaluable points.
HessianReport hessian_report(const LagrangeSystem& sys, const PhiJet& phi, const SamplePlan& plan);

struct HomogeneousReport {
    double degree_L = 0.0;
    double degree_sigma = 0.0;
    bool spray = false;
    ConditionReport wedge;     // d_J L ^ sigma = 0
    bool nontrivial = false;   // (1-p)/p L_i L_j + L g_ij != 0
    double root_p = 0.0;       // phi(L) = a L^(1/p) + b on pass
};

/// Homogeneous pathway: L and sigma homogeneous of a common order p > 1 on a
/// spray. Throws NotHomogeneous with the measured degrees otherwise.
HomogeneousReport check_homogeneous(const LagrangeSystem& sys, const SamplePlan& plan,
                                    double tol = kIdentityTolerance);

struct DissipativeReport {
    ConditionReport defect_matches;  // delta_S L = d_J D
    ConditionReport energy_balance;  // S(E_L) = C(D)
    bool rayleigh_applicable = false; // D fiber-homogeneous of degree 2
    std::optional<ConditionReport> rayleigh_balance; // S(E_L) = 2 D
    bool dissipation_negative = false; // D < 0 at every sample
};

DissipativeReport check_dissipative(const LagrangeSystem& sys, const ScalarField& D, const SamplePlan& plan,
                                    double tol = kIdentityTolerance);

} // namespace lagdeform
