#include "lagdeform/expr.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "lagdeform/errors.hpp"
#include "ops.hpp"

namespace lagdeform {

struct Node {
    Op op = Op::Constant;
    double value = 0.0;
    std::string name;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

const std::shared_ptr<const Node>& zero_node()
{
    static const auto node = std::make_shared<const Node>();
    return node;
}

const char* function_name(Op op)
{
    switch (op) {
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Abs: return "abs";
    default: return "?";
    }
}

} // namespace

bool is_unary(Op op) noexcept
{
    switch (op) {
    case Op::Neg:
    case Op::Exp:
    case Op::Ln:
    case Op::Sqrt:
    case Op::Sin:
    case Op::Cos:
    case Op::Abs:
    case Op::Sign:
    case Op::Pow: return true;
    default: return false;
    }
}

bool is_binary(Op op) noexcept
{
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}

Expression make_node(Op op, double value, std::string name, const Expression* a, const Expression* b)
{
    auto node = std::make_shared<Node>();
    node->op = op;
    node->value = value;
    node->name = std::move(name);
    if (a) node->a = a->node_;
    if (b) node->b = b->node_;
    return Expression(std::shared_ptr<const Node>(std::move(node)));
}

Expression::Expression() : node_(zero_node()) {}

Expression::Expression(double value)
    : Expression(value == 0.0 && !std::signbit(value) ? Expression()
                                                      : make_node(Op::Constant, value, {}, nullptr, nullptr))
{
}

Expression Expression::variable(std::string name)
{
    return make_node(Op::Variable, 0.0, std::move(name), nullptr, nullptr);
}

Op Expression::op() const noexcept { return node_->op; }
double Expression::value() const noexcept { return node_->value; }
const std::string& Expression::name() const noexcept { return node_->name; }
Expression Expression::lhs() const { return node_->a ? Expression(node_->a) : Expression(); }
Expression Expression::rhs() const { return node_->b ? Expression(node_->b) : Expression(); }

// ---------------------------------------------------------------------------
// Factories with constant folding

Expression apply_unary(Op op, const Expression& a)
{
    if (a.is_constant()) {
        double out = 0.0;
        if (detail::apply_unary_op(op, a.value(), out)) return Expression(out);
    }
    if (op == Op::Neg && a.op() == Op::Neg) return a.lhs();
    return make_node(op, 0.0, {}, &a, nullptr);
}

Expression pow(const Expression& base, double exponent)
{
    if (exponent == 0.0) return Expression(1.0);
    if (exponent == 1.0) return base;
    if (base.is_constant()) {
        double out = 0.0;
        if (detail::apply_binary_op(Op::Pow, base.value(), base.value(), exponent, out))
            return Expression(out);
    }
    return make_node(Op::Pow, exponent, {}, &base, nullptr);
}

Expression apply_binary(Op op, const Expression& a, const Expression& b)
{
    if (a.is_constant() && b.is_constant()) {
        double out = 0.0;
        if (detail::apply_binary_op(op, a.value(), b.value(), 0.0, out)) return Expression(out);
    }
    switch (op) {
    case Op::Add:
        if (a.is_constant(0.0)) return b;
        if (b.is_constant(0.0)) return a;
        break;
    case Op::Sub:
        if (b.is_constant(0.0)) return a;
        if (a.is_constant(0.0)) return -b;
        break;
    case Op::Mul:
        if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression();
        if (a.is_constant(1.0)) return b;
        if (b.is_constant(1.0)) return a;
        if (a.is_constant(-1.0)) return -b;
        if (b.is_constant(-1.0)) return -a;
        break;
    case Op::Div:
        if (a.is_constant(0.0) && !(b.is_constant(0.0))) return Expression();
        if (b.is_constant(1.0)) return a;
        break;
    default: break;
    }
    return make_node(op, 0.0, {}, &a, &b);
}

Expression operator-(const Expression& a) { return apply_unary(Op::Neg, a); }
Expression operator+(const Expression& a, const Expression& b) { return apply_binary(Op::Add, a, b); }
Expression operator-(const Expression& a, const Expression& b) { return apply_binary(Op::Sub, a, b); }
Expression operator*(const Expression& a, const Expression& b) { return apply_binary(Op::Mul, a, b); }
Expression operator/(const Expression& a, const Expression& b) { return apply_binary(Op::Div, a, b); }
Expression exp(const Expression& a) { return apply_unary(Op::Exp, a); }
Expression ln(const Expression& a) { return apply_unary(Op::Ln, a); }
Expression sqrt(const Expression& a) { return apply_unary(Op::Sqrt, a); }
Expression sin(const Expression& a) { return apply_unary(Op::Sin, a); }
Expression cos(const Expression& a) { return apply_unary(Op::Cos, a); }
Expression abs(const Expression& a) { return apply_unary(Op::Abs, a); }
Expression sign(const Expression& a) { return apply_unary(Op::Sign, a); }

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string Expression::to_string() const
{
    const Node& n = *node_;
    switch (n.op) {
    case Op::Constant: {
        std::string s = format_number(n.value);
        return n.value < 0.0 || std::signbit(n.value) ? "(" + s + ")" : s;
    }
    case Op::Variable: return n.name;
    case Op::Neg: return "(-" + lhs().to_string() + ")";
    case Op::Sign: {
        // Printed through the grammar: u/abs(u) is exactly +-1 and fails at 0.
        const std::string u = lhs().to_string();
        return "(" + u + "/abs(" + u + "))";
    }
    case Op::Pow: {
        const std::string p = format_number(n.value);
        const std::string base = lhs().to_string();
        return "(" + base + "^" + (n.value < 0.0 ? "(" + p + ")" : p) + ")";
    }
    case Op::Add: return "(" + lhs().to_string() + " + " + rhs().to_string() + ")";
    case Op::Sub: return "(" + lhs().to_string() + " - " + rhs().to_string() + ")";
    case Op::Mul: return "(" + lhs().to_string() + "*" + rhs().to_string() + ")";
    case Op::Div: return "(" + lhs().to_string() + "/" + rhs().to_string() + ")";
    default: return std::string(function_name(n.op)) + "(" + lhs().to_string() + ")";
    }
}

// ---------------------------------------------------------------------------
// Evaluation

double Binding::at(const std::string& name) const
{
    auto it = values_.find(name);
    if (it == values_.end()) throw UnboundVariable(name);
    return it->second;
}

namespace {

template <typename T, typename Leaf>
T eval_memo(const Expression& e, const Leaf& leaf, std::unordered_map<const Node*, T>& memo)
{
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    T out{};
    const Op op = e.op();
    if (op == Op::Constant) {
        out = T(e.value());
    } else if (op == Op::Variable) {
        out = leaf(e.name());
    } else if (op == Op::Pow) {
        const T a = eval_memo<T>(e.lhs(), leaf, memo);
        if (!detail::apply_binary_op(op, a, a, e.value(), out)) throw DomainViolation(e.to_string());
    } else if (is_unary(op)) {
        const T a = eval_memo<T>(e.lhs(), leaf, memo);
        if (!detail::apply_unary_op(op, a, out)) throw DomainViolation(e.to_string());
    } else {
        const T a = eval_memo<T>(e.lhs(), leaf, memo);
        const T b = eval_memo<T>(e.rhs(), leaf, memo);
        if (!detail::apply_binary_op(op, a, b, 0.0, out)) throw DomainViolation(e.to_string());
    }
    memo.emplace(e.id(), out);
    return out;
}

} // namespace

double evaluate(const Expression& e, const Binding& b)
{
    std::unordered_map<const Node*, double> memo;
    return eval_memo<double>(e, [&](const std::string& name) { return b.at(name); }, memo);
}

std::pair<double, double> evaluate_dual(const Expression& e, const Binding& b, const std::string& seed)
{
    std::unordered_map<const Node*, Dual> memo;
    const Dual r = eval_memo<Dual>(
        e,
        [&](const std::string& name) {
            return name == seed ? Dual::variable(b.at(name)) : Dual(b.at(name));
        },
        memo);
    return {r.v, r.d};
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expression derive(const Expression& e, const std::string& var,
                  std::unordered_map<const Node*, Expression>& memo)
{
    if (auto it = memo.find(e.id()); it != memo.end()) return it->second;
    Expression d;
    const Op op = e.op();
    if (op == Op::Constant) {
        d = Expression();
    } else if (op == Op::Variable) {
        d = Expression(e.name() == var ? 1.0 : 0.0);
    } else {
        const Expression u = e.lhs();
        const Expression du = derive(u, var, memo);
        switch (op) {
        case Op::Neg: d = -du; break;
        case Op::Exp: d = e * du; break;
        case Op::Ln: d = du / u; break;
        case Op::Sqrt: d = du / (Expression(2.0) * e); break;
        case Op::Sin: d = cos(u) * du; break;
        case Op::Cos: d = -(sin(u) * du); break;
        case Op::Abs: d = sign(u) * du; break;
        case Op::Sign: d = Expression(); break;
        case Op::Pow: {
            const double p = e.value();
            d = du.is_constant(0.0) ? Expression() : Expression(p) * pow(u, p - 1.0) * du;
            break;
        }
        default: {
            const Expression v = e.rhs();
            const Expression dv = derive(v, var, memo);
            switch (op) {
            case Op::Add: d = du + dv; break;
            case Op::Sub: d = du - dv; break;
            case Op::Mul: d = du * v + u * dv; break;
            case Op::Div:
                if (dv.is_constant(0.0))
                    d = du / v;
                else
                    d = (du * v - u * dv) / (v * v);
                break;
            default: break;
            }
        }
        }
    }
    memo.emplace(e.id(), d);
    return d;
}

} // namespace

Expression partial(const Expression& e, const std::string& var)
{
    std::unordered_map<const Node*, Expression> memo;
    return derive(e, var, memo);
}

Expression substitute(const Expression& e, const std::map<std::string, Expression>& replacements)
{
    std::unordered_map<const Node*, Expression> memo;
    std::function<Expression(const Expression&)> rec = [&](const Expression& x) -> Expression {
        if (auto it = memo.find(x.id()); it != memo.end()) return it->second;
        Expression out;
        const Op op = x.op();
        if (op == Op::Constant) {
            out = x;
        } else if (op == Op::Variable) {
            auto it = replacements.find(x.name());
            out = it == replacements.end() ? x : it->second;
        } else if (op == Op::Pow) {
            out = pow(rec(x.lhs()), x.value());
        } else if (is_unary(op)) {
            out = apply_unary(op, rec(x.lhs()));
        } else {
            out = apply_binary(op, rec(x.lhs()), rec(x.rhs()));
        }
        memo.emplace(x.id(), out);
        return out;
    };
    return rec(e);
}

namespace {

template <typename Visit>
void visit_unique(const Expression& e, std::unordered_set<const Node*>& seen, const Visit& visit)
{
    if (!seen.insert(e.id()).second) return;
    visit(e);
    if (is_unary(e.op())) visit_unique(e.lhs(), seen, visit);
    if (is_binary(e.op())) {
        visit_unique(e.lhs(), seen, visit);
        visit_unique(e.rhs(), seen, visit);
    }
}

} // namespace

std::set<std::string> free_variables(const Expression& e)
{
    std::set<std::string> out;
    std::unordered_set<const Node*> seen;
    visit_unique(e, seen, [&](const Expression& x) {
        if (x.op() == Op::Variable) out.insert(x.name());
    });
    return out;
}

std::size_t node_count(const Expression& e)
{
    std::unordered_set<const Node*> seen;
    visit_unique(e, seen, [](const Expression&) {});
    return seen.size();
}

} // namespace lagdeform
