#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lagdeform/deform.hpp"
#include "lagdeform/geometry.hpp"

namespace lagdeform {

struct IntegratorConfig {
    double step = 1e-3;
    double horizon = 1.0;
    PhasePoint initial;
    // Chart box; leaving it truncates the trajectory. Empty means unbounded.
    std::map<std::string, Interval> box;
};

struct Trajectory {
    double h = 0.0;
    std::vector<double> times;
    std::vector<PhasePoint> states;
    bool truncated = false;
    std::vector<std::string> warnings;
};

/// Classical RK4 for dx/dt = y, dy/dt = -2 G(x, y). Throws
/// IntegrationError with the step index on a domain violation or blowup.
Trajectory integrate_geodesic(const SemiSpray& S, const IntegratorConfig& cfg);

/// max over i and interior k of |d/dt (dLag/dy^i) - dLag/dx^i|, with d/dt by
/// central differences of the sampled momenta. Throws TooShort below 4 states.
double el_residual_along(const Trajectory& traj, const DeformedLagrangian& lag);

struct EnergySeries {
    std::vector<double> values; // E(t_k) = C(Lag) - Lag
    double drift = 0.0;         // max |E(t_k) - E(t_0)|
    bool strictly_decreasing = false;
};

EnergySeries energy_along(const Trajectory& traj, const DeformedLagrangian& lag);

struct DissipationSeries {
    std::vector<double> S_energy;  // S(E_L)
    std::vector<double> C_of_D;    // C(D)
    std::vector<double> twice_D;   // 2D
    double balance = 0.0;          // max |S(E_L) - C(D)| / (1 + |S(E_L)|)
    bool rayleigh = false;         // D(x, r y) = r^2 D(x, y) at every state
    std::optional<double> rayleigh_balance; // max |S(E_L) - 2D| / (1 + |S(E_L)|)
    bool negative = false;         // D < 0 at every state with y != 0
};

DissipationSeries dissipation_along(const Trajectory& traj, const SemiSpray& S, const ScalarField& L,
                                    const ScalarField& D);

/// CSV with columns t, x1..xn, y1..yn, E_L, E_PhiL.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const DeformedLagrangian& raw,
                          const DeformedLagrangian& deformed);

} // namespace lagdeform
