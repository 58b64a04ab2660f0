#pragma once

#include <cmath>

#include "lagdeform/dual.hpp"
#include "lagdeform/expr.hpp"

namespace lagdeform::detail {

// Shared scalar semantics for the tree walker and compiled programs so both
// produce bit-identical values. Returns false on a domain violation.
template <typename T>
inline double real_part(const T& v)
{
    if constexpr (std::is_same_v<T, Dual>)
        return v.v;
    else
        return v;
}

template <typename T>
inline bool apply_unary_op(Op op, const T& a, T& out)
{
    using std::abs, std::cos, std::exp, std::log, std::sin, std::sqrt;
    const double av = real_part(a);
    switch (op) {
    case Op::Neg: out = -a; break;
    case Op::Exp: out = exp(a); break;
    case Op::Ln:
        if (!(av > 0.0)) return false;
        out = log(a);
        break;
    case Op::Sqrt:
        if (!(av >= 0.0)) return false;
        if constexpr (std::is_same_v<T, Dual>) {
            if (av == 0.0) return false; // derivative undefined
        }
        out = sqrt(a);
        break;
    case Op::Sin: out = sin(a); break;
    case Op::Cos: out = cos(a); break;
    case Op::Abs:
        if constexpr (std::is_same_v<T, Dual>) {
            if (av == 0.0) return false;
        }
        out = abs(a);
        break;
    case Op::Sign:
        if (av == 0.0) return false;
        out = T(av > 0.0 ? 1.0 : -1.0);
        break;
    default: return false;
    }
    return std::isfinite(real_part(out));
}

inline bool pow_in_domain(double base, double exponent)
{
    if (base < 0.0 && std::trunc(exponent) != exponent) return false;
    if (base == 0.0 && exponent < 0.0) return false;
    return true;
}

template <typename T>
inline bool apply_binary_op(Op op, const T& a, const T& b, double exponent, T& out)
{
    using std::pow;
    switch (op) {
    case Op::Add: out = a + b; break;
    case Op::Sub: out = a - b; break;
    case Op::Mul: out = a * b; break;
    case Op::Div:
        if (real_part(b) == 0.0) return false;
        out = a / b;
        break;
    case Op::Pow:
        if (!pow_in_domain(real_part(a), exponent)) return false;
        if constexpr (std::is_same_v<T, Dual>) {
            if (real_part(a) == 0.0 && exponent < 1.0 && exponent != 0.0) return false;
        }
        out = pow(a, exponent);
        break;
    default: return false;
    }
    return std::isfinite(real_part(out));
}

} // namespace lagdeform::detail
