#include "lagdeform/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include "lagdeform/errors.hpp"
#include "lagdeform/program.hpp"

namespace lagdeform {

std::string x_name(int i) { return "x" + std::to_string(i + 1); }
std::string y_name(int i) { return "y" + std::to_string(i + 1); }

std::vector<std::string> chart_variables(int n)
{
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) names.push_back(x_name(i));
    for (int i = 0; i < n; ++i) names.push_back(y_name(i));
    return names;
}

std::vector<double> PhasePoint::flat() const
{
    std::vector<double> out(x);
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

PhasePoint PhasePoint::from_flat(std::span<const double> values, int n)
{
    const auto un = static_cast<std::size_t>(n);
    if (values.size() != 2 * un) throw DimensionMismatch("phase point needs " + std::to_string(2 * n) + " values");
    return {std::vector<double>(values.begin(), values.begin() + n), std::vector<double>(values.begin() + n, values.end())};
}

void SamplePlan::validate(int n) const
{
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    if (count < 1) throw std::invalid_argument("sample count must be at least 1");
    if (!(guard > 0.0)) throw std::invalid_argument("guard threshold must be positive");
    if (!(max_rejection_ratio >= 0.0 && max_rejection_ratio < 1.0))
        throw std::invalid_argument("max rejection ratio must lie in [0, 1)");
    for (const auto& name : chart_variables(n)) {
        auto it = box.find(name);
        if (it == box.end()) throw std::invalid_argument("box has no bounds for " + name);
        const auto [lo, hi] = it->second;
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
            throw std::invalid_argument("box bounds for " + name + " must be finite with lo < hi");
    }
}

bool SamplePlan::contains(const PhasePoint& p) const
{
    const auto names = chart_variables(p.dim());
    const auto values = p.flat();
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto it = box.find(names[i]);
        if (it == box.end()) continue;
        if (values[i] < it->second.lo || values[i] > it->second.hi) return false;
    }
    return true;
}

double UniformStream::next()
{
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

SampleSet draw_samples(int n, const SamplePlan& plan, const Guards& guards)
{
    plan.validate(n);
    const auto names = chart_variables(n);
    std::vector<Expression> outputs(guards.nonzero);
    outputs.insert(outputs.end(), guards.evaluable.begin(), guards.evaluable.end());
    const Program program(outputs, names);

    std::vector<Interval> bounds;
    for (const auto& name : names) bounds.push_back(plan.box.at(name));

    const auto budget = static_cast<std::size_t>(
        std::ceil(static_cast<double>(plan.count) / (1.0 - plan.max_rejection_ratio)));
    UniformStream rng(plan.seed);
    SampleSet set;
    std::vector<double> values(names.size());
    std::vector<double> out(outputs.size());
    while (set.points.size() < plan.count) {
        if (set.attempted >= budget) throw TooManyRejections(set.points.size(), set.attempted);
        ++set.attempted;
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = rng.next(bounds[i].lo, bounds[i].hi);
        bool ok = program.try_run(values, out);
        for (std::size_t g = 0; ok && g < guards.nonzero.size(); ++g) ok = std::abs(out[g]) > plan.guard;
        if (!ok) {
            ++set.rejected;
            continue;
        }
        set.points.push_back(PhasePoint::from_flat(values, n));
    }
    return set;
}

} // namespace lagdeform
