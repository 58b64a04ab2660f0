#include "lagdeform/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "lagdeform/errors.hpp"

namespace lagdeform {

namespace {

bool inside(const std::map<std::string, Interval>& box, const std::vector<std::string>& names,
            const std::vector<double>& z)
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = box.find(names[i]);
        if (it != box.end() && (z[i] < it->second.lo || z[i] > it->second.hi)) return false;
    }
    return true;
}

} // namespace

Trajectory integrate_geodesic(const SemiSpray& S, const IntegratorConfig& cfg)
{
    const int n = S.n;
    const auto un = static_cast<std::size_t>(n);
    if (cfg.initial.dim() != n || cfg.initial.y.size() != un)
        throw DimensionMismatch("initial point dimension differs from the spray");
    if (!(cfg.step > 0.0) || !(cfg.horizon > 0.0)) throw std::invalid_argument("step and horizon must be positive");
    const double ratio = cfg.horizon / cfg.step;
    const auto K = static_cast<std::size_t>(std::llround(ratio));
    if (K == 0 || std::abs(ratio - static_cast<double>(K)) > 1e-9 * ratio)
        throw std::invalid_argument("horizon must be a whole number of steps");

    const auto names = chart_variables(n);
    const Program G(S.G, names);
    const double h = cfg.step;

    Trajectory traj;
    traj.h = h;
    std::vector<double> z = cfg.initial.flat();
    traj.times.push_back(0.0);
    traj.states.push_back(cfg.initial);

    std::vector<double> g(un), k1(2 * un), k2(2 * un), k3(2 * un), k4(2 * un), tmp(2 * un);
    std::size_t step = 0;
    auto field = [&](const std::vector<double>& s, std::vector<double>& dz) {
        if (!G.try_run(s, g)) {
            try {
                G.run(s, g);
            } catch (const DomainViolation& e) {
                throw IntegrationError(e.what(), step);
            }
        }
        for (std::size_t i = 0; i < un; ++i) {
            dz[i] = s[un + i];
            dz[un + i] = -2.0 * g[i];
        }
    };

    for (step = 1; step <= K; ++step) {
        field(z, k1);
        for (std::size_t i = 0; i < 2 * un; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
        field(tmp, k2);
        for (std::size_t i = 0; i < 2 * un; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
        field(tmp, k3);
        for (std::size_t i = 0; i < 2 * un; ++i) tmp[i] = z[i] + h * k3[i];
        field(tmp, k4);
        for (std::size_t i = 0; i < 2 * un; ++i) {
            tmp[i] = z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(tmp[i])) throw IntegrationError("non-finite state", step);
        }
        if (!cfg.box.empty() && !inside(cfg.box, names, tmp)) {
            traj.truncated = true;
            traj.warnings.push_back("trajectory left the chart box at step " + std::to_string(step) +
                                    "; truncated at t = " + format_number(traj.times.back()));
            break;
        }
        z = tmp;
        traj.times.push_back(static_cast<double>(step) * h);
        traj.states.push_back(PhasePoint::from_flat(z, n));
    }
    return traj;
}

double el_residual_along(const Trajectory& traj, const DeformedLagrangian& lag)
{
    const std::size_t K = traj.states.size();
    if (K < 4) throw TooShort("trajectory needs at least 4 states, got " + std::to_string(K));
    std::vector<DeformedLagrangian::Values> v;
    v.reserve(K);
    for (const auto& p : traj.states) v.push_back(lag.eval(p));
    double worst = 0.0;
    const auto n = static_cast<std::size_t>(lag.dim());
    for (std::size_t k = 1; k + 1 < K; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const double dp = (v[k + 1].dy[i] - v[k - 1].dy[i]) / (2.0 * traj.h);
            worst = std::max(worst, std::abs(dp - v[k].dx[i]));
        }
    return worst;
}

EnergySeries energy_along(const Trajectory& traj, const DeformedLagrangian& lag)
{
    EnergySeries out;
    for (const auto& p : traj.states) out.values.push_back(lag.eval(p).energy);
    out.strictly_decreasing = out.values.size() >= 2;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.drift = std::max(out.drift, std::abs(out.values[k] - out.values[0]));
        if (k > 0 && !(out.values[k] < out.values[k - 1])) out.strictly_decreasing = false;
    }
    return out;
}

DissipationSeries dissipation_along(const Trajectory& traj, const SemiSpray& S, const ScalarField& L,
                                    const ScalarField& D)
{
    const int n = S.n;
    const ScalarField EL = energy(L);
    const Program prog({spray_apply(S, EL).expr, liouville_apply(D).expr, D.expr}, chart_variables(n));

    DissipationSeries out;
    out.rayleigh = true;
    out.negative = true;
    double rayleigh = 0.0;
    for (const auto& p : traj.states) {
        const auto v = prog.run(p.flat());
        out.S_energy.push_back(v[0]);
        out.C_of_D.push_back(v[1]);
        out.twice_D.push_back(2.0 * v[2]);
        out.balance = std::max(out.balance, std::abs(v[0] - v[1]) / (1.0 + std::abs(v[0])));
        rayleigh = std::max(rayleigh, std::abs(v[0] - 2.0 * v[2]) / (1.0 + std::abs(v[0])));

        bool moving = false;
        for (double yi : p.y) moving = moving || yi != 0.0;
        if (moving && !(v[2] < 0.0)) out.negative = false;
        for (double r : {0.5, 2.0}) {
            PhasePoint q = p;
            for (auto& yi : q.y) yi *= r;
            const double scaled = prog.run(q.flat())[2];
            if (std::abs(scaled - r * r * v[2]) > 1e-9 * (1.0 + std::abs(scaled))) out.rayleigh = false;
        }
    }
    if (out.rayleigh) out.rayleigh_balance = rayleigh;
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const DeformedLagrangian& raw,
                          const DeformedLagrangian& deformed)
{
    const int n = raw.dim();
    out << "t";
    for (int i = 0; i < n; ++i) out << ',' << x_name(i);
    for (int i = 0; i < n; ++i) out << ',' << y_name(i);
    out << ",E_L,E_PhiL\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto& p = traj.states[k];
        out << format_number(traj.times[k]);
        for (double v : p.x) out << ',' << format_number(v);
        for (double v : p.y) out << ',' << format_number(v);
        out << ',' << format_number(raw.eval(p).energy) << ',' << format_number(deformed.eval(p).energy) << '\n';
    }
}

} // namespace lagdeform
