#pragma once

#include <optional>
#include <vector>

#include "lagdeform/expr.hpp"
#include "lagdeform/sampling.hpp"

namespace lagdeform {

// Tangent-bundle objects in a single chart with coordinates (x1..xn, y1..yn).

/// S = y^i d/dx^i - 2 G^i d/dy^i. JS = C holds by construction.
struct SemiSpray {
    int n = 0;
    std::vector<Expression> G;
};

/// A function on TM: a Lagrangian, dissipation function, energy, ...
struct ScalarField {
    int n = 0;
    Expression expr;
};

/// sigma = sigma_i dx^i; only horizontal components exist.
struct SemiBasicForm {
    int n = 0;
    std::vector<Expression> components;
};

using ExpressionMatrix = std::vector<std::vector<Expression>>;

SemiSpray make_spray(std::vector<Expression> G);
SemiBasicForm make_form(std::vector<Expression> components);

/// C(F) = y^i dF/dy^i.
ScalarField liouville_apply(const ScalarField& F);

/// S(F) = y^i dF/dx^i - 2 G^i dF/dy^i.
ScalarField spray_apply(const SemiSpray& S, const ScalarField& F);

/// E_L = C(L) - L.
ScalarField energy(const ScalarField& L);

/// d_J L = dL/dy^i dx^i.
SemiBasicForm vertical_differential(const ScalarField& L);

/// delta_S L = (S(dL/dy^i) - dL/dx^i) dx^i.
SemiBasicForm lagrange_differential(const SemiSpray& S, const ScalarField& L);

/// g_ij = d^2 L / dy^i dy^j. Off-diagonal entries are shared between (i,j)
/// and (j,i), so the result is symmetric by construction.
ExpressionMatrix fiber_hessian(const ScalarField& L);

/// i_S omega = omega_i y^i for a semi-basic 1-form.
ScalarField contract_with_spray(const SemiSpray& S, const SemiBasicForm& omega);

/// Linear combination a*F + b*G of semi-basic forms.
SemiBasicForm combine(double a, const SemiBasicForm& F, double b, const SemiBasicForm& G);

inline constexpr double kHomogeneityTolerance = 1e-9;
inline constexpr double kHomogeneityScales[] = {0.5, 2.0, 3.0};

/// Fiber degree p with F(x, r y) = r^p F(x, y) at every sample of `plan` and
/// r in {0.5, 2, 3}; nullopt when no single p fits.
std::optional<double> homogeneity_degree(const ScalarField& F, const SamplePlan& plan);

/// Common fiber degree of the components of a semi-basic form (components
/// that vanish at every sample are ignored).
std::optional<double> homogeneity_degree(const SemiBasicForm& sigma, const SamplePlan& plan);

/// Returns 2 if every G^i is fiber-homogeneous of degree 2 (the semi-spray is
/// a spray), nullopt otherwise.
std::optional<double> homogeneity_degree(const SemiSpray& S, const SamplePlan& plan);

} // namespace lagdeform
