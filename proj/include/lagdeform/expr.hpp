#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "lagdeform/dual.hpp"

namespace lagdeform {

enum class Op : std::uint8_t {
    Constant,
    Variable,
    Neg,
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Abs,
    Sign, // only produced by differentiating abs
    Add,
    Sub,
    Mul,
    Div,
    Pow, // real constant exponent
};

bool is_unary(Op op) noexcept;
bool is_binary(Op op) noexcept;

struct Node;

/// Immutable symbolic expression over chart coordinates and parameters.
///
/// Copies share the underlying tree. Construction goes through the factory
/// functions below, which fold constants and drop additive zeros and
/// multiplicative ones; no other rewriting is performed.
class Expression {
public:
    Expression();                       // the constant 0
    Expression(double value);           // NOLINT: implicit constant
    static Expression variable(std::string name);

    Op op() const noexcept;
    double value() const noexcept;      // Constant payload or Pow exponent
    const std::string& name() const noexcept;
    Expression lhs() const; // operand of unary ops, left of binary
    Expression rhs() const;

    bool is_constant() const noexcept { return op() == Op::Constant; }
    bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

    // Identity of the shared node; used for memoisation and common
    // subexpression sharing in compiled programs.
    const Node* id() const noexcept { return node_.get(); }

    std::string to_string() const;

private:
    explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    friend Expression make_node(Op, double, std::string, const Expression*, const Expression*);

    std::shared_ptr<const Node> node_;
};

Expression operator-(const Expression& a);
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression pow(const Expression& base, double exponent);
Expression exp(const Expression& a);
Expression ln(const Expression& a);
Expression sqrt(const Expression& a);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression abs(const Expression& a);
Expression sign(const Expression& a);
Expression apply_unary(Op op, const Expression& a);
Expression apply_binary(Op op, const Expression& a, const Expression& b);

/// Total map from variable name to value. Lookup of a missing name throws
/// UnboundVariable.
class Binding {
public:
    Binding() = default;
    Binding(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

    void set(const std::string& name, double value) { values_[name] = value; }
    double at(const std::string& name) const;
    bool contains(const std::string& name) const { return values_.count(name) != 0; }
    const std::map<std::string, double>& values() const noexcept { return values_; }

private:
    std::map<std::string, double> values_;
};

/// Parses the expression DSL. Every identifier must be in `declared`.
Expression parse(std::string_view source, const std::set<std::string>& declared);

double evaluate(const Expression& e, const Binding& b);

/// Value and derivative along `seed` by dual-number propagation.
std::pair<double, double> evaluate_dual(const Expression& e, const Binding& b,
                                        const std::string& seed);

/// Exact symbolic partial derivative, constant-folded.
Expression partial(const Expression& e, const std::string& var);

/// Replaces variables by expressions (typically parameter values).
Expression substitute(const Expression& e, const std::map<std::string, Expression>& replacements);

std::set<std::string> free_variables(const Expression& e);

/// Number of distinct nodes reachable from `e`.
std::size_t node_count(const Expression& e);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_number(double v);

} // namespace lagdeform
