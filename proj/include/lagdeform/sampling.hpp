#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lagdeform/expr.hpp"

namespace lagdeform {

// Chart variable names: x1..xn, then y1..yn.
std::string x_name(int i);
std::string y_name(int i);
std::vector<std::string> chart_variables(int n);

struct PhasePoint {
    std::vector<double> x;
    std::vector<double> y;

    int dim() const noexcept { return static_cast<int>(x.size()); }
    // Values in chart_variables order.
    std::vector<double> flat() const;
    static PhasePoint from_flat(std::span<const double> values, int n);
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct SamplePlan {
    std::map<std::string, Interval> box; // one entry per chart variable
    std::size_t count = 500;
    std::uint64_t seed = 1;
    double guard = 1e-6;                 // minimum |g| for every guard expression
    double max_rejection_ratio = 0.9;    // fraction of draws allowed to be rejected

    // Throws std::invalid_argument when the plan cannot be used on an n-dim chart.
    void validate(int n) const;
    bool contains(const PhasePoint& p) const;
};

/// Expressions a sample point must satisfy: every `nonzero` entry exceeds the
/// plan's guard in magnitude and every `evaluable` entry is in its domain.
struct Guards {
    std::vector<Expression> nonzero;
    std::vector<Expression> evaluable;
};

struct SampleSet {
    std::vector<PhasePoint> points;
    std::size_t attempted = 0;
    std::size_t rejected = 0;
};

/// Uniform draws from the plan's box; deterministic for a fixed seed. Throws
/// TooManyRejections when the acceptance budget is exhausted.
SampleSet draw_samples(int n, const SamplePlan& plan, const Guards& guards);

/// Deterministic uniform variates on [0, 1) independent of the standard
/// library's distribution implementations.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : state_(seed) {}
    double next();
    double next(double lo, double hi) { return lo + (hi - lo) * next(); }

private:
    std::uint64_t state_;
};

} // namespace lagdeform
