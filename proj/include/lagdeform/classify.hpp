#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lagdeform/theorem.hpp"

namespace lagdeform {

// Families of f with phi''/phi' = f(L).

struct ConstantFamily {        // f = gamma
    double gamma = 0.0;
};
struct PowerShiftFamily {      // f = gamma / (L + a), gamma not in {0, -1}
    double gamma = 0.0;
    double a = 0.0;
};
struct LogarithmicFamily {     // f = -1 / (L + a)
    double a = 0.0;
};
struct MoebiusFamily {         // f = -2c / (cL + d), projective in (c, d)
    double c = 1.0;
    double d = 0.0;
};
struct HomogeneousRootFamily { // f = (1/p - 1) / L
    double p = 2.0;
};
struct TabulatedFamily {       // samples of f, strictly increasing L, >= 8 points
    std::vector<CloudPoint> points;
};

using DeformationClass = std::variant<ConstantFamily, PowerShiftFamily, LogarithmicFamily, MoebiusFamily,
                                      HomogeneousRootFamily, TabulatedFamily>;

std::string family_name(const DeformationClass& cls);
/// e.g. "PowerShift(gamma=-0.5, a=0)"; parameters rounded to 9 decimals.
std::string describe(const DeformationClass& cls);
/// f(L) of the family member; Tabulated interpolates linearly.
double generating_function(const DeformationClass& cls, double L);

/// Rescales (c, d) so that max(|c|, |d|) = 1 and c >= 0.
MoebiusFamily normalize(MoebiusFamily m);

struct FamilyFit {
    DeformationClass params;
    double residual = 0.0;  // weighted RMS of (model - f) / (1 + |f|)
    int parameters = 0;     // effective free parameters
    double penalized = 0.0; // residual + tol_fit * parameters
    bool valid = false;     // converged and inside the family's domain
};

struct FunctionalFit {
    DeformationClass chosen;
    double residual = 0.0;
    std::vector<FamilyFit> candidates; // listing order: Constant, PowerShift, Logarithmic, Moebius
    std::optional<HomogeneousRootFamily> homogeneous_root;
};

inline constexpr double kFitTolerance = 1e-6;

double fit_residual(const DeformationClass& cls, const std::vector<CloudPoint>& cloud);

/// Least-squares fit of each family with a parsimony penalty of `tol_fit`
/// per effective parameter. Falls back to Tabulated when no family reaches a
/// residual of `tol_fit`.
FunctionalFit classify(const std::vector<CloudPoint>& cloud, double tol_fit = kFitTolerance);

} // namespace lagdeform
