#include "lagdeform/program.hpp"

#include <algorithm>
#include <unordered_map>

#include "lagdeform/errors.hpp"
#include "ops.hpp"

namespace lagdeform {

Program::Program(const std::vector<Expression>& outputs, std::vector<std::string> variables)
    : variables_(std::move(variables))
{
    std::unordered_map<std::string, int> slot;
    for (std::size_t i = 0; i < variables_.size(); ++i) slot.emplace(variables_[i], static_cast<int>(i));

    std::unordered_map<const Node*, int> reg;
    // Iterative post-order to avoid deep recursion on long derivative chains.
    auto emit = [&](const Expression& root) -> int {
        std::vector<std::pair<Expression, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [e, expanded] = stack.back();
            stack.pop_back();
            if (reg.count(e.id())) continue;
            const Op op = e.op();
            if (!expanded && (is_unary(op) || is_binary(op))) {
                stack.emplace_back(e, true);
                if (is_binary(op)) stack.emplace_back(e.rhs(), false);
                stack.emplace_back(e.lhs(), false);
                continue;
            }
            Instr in{op, -1, -1, e.value()};
            if (op == Op::Variable) {
                auto it = slot.find(e.name());
                if (it == slot.end()) throw UnboundVariable(e.name());
                in.a = it->second;
            } else if (is_unary(op)) {
                in.a = reg.at(e.lhs().id());
            } else if (is_binary(op)) {
                in.a = reg.at(e.lhs().id());
                in.b = reg.at(e.rhs().id());
            }
            reg.emplace(e.id(), static_cast<int>(code_.size()));
            code_.push_back(in);
            sources_.push_back(e);
        }
        return reg.at(root.id());
    };
    for (const auto& e : outputs) outputs_.push_back(emit(e));
}

int Program::execute(std::span<const double> vars, std::vector<double>& regs) const
{
    if (vars.size() != variables_.size())
        throw DimensionMismatch("program expects " + std::to_string(variables_.size()) + " variables, got " +
                                std::to_string(vars.size()));
    regs.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& in = code_[i];
        double& out = regs[i];
        switch (in.op) {
        case Op::Constant: out = in.value; break;
        case Op::Variable: out = vars[static_cast<std::size_t>(in.a)]; break;
        case Op::Pow:
            if (!detail::apply_binary_op(Op::Pow, regs[in.a], regs[in.a], in.value, out)) return static_cast<int>(i);
            break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
            if (!detail::apply_binary_op(in.op, regs[in.a], regs[in.b], 0.0, out)) return static_cast<int>(i);
            break;
        default:
            if (!detail::apply_unary_op(in.op, regs[in.a], out)) return static_cast<int>(i);
        }
    }
    return -1;
}

void Program::run(std::span<const double> vars, std::span<double> out) const
{
    std::vector<double> regs;
    if (const int bad = execute(vars, regs); bad >= 0)
        throw DomainViolation(sources_[static_cast<std::size_t>(bad)].to_string());
    for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = regs[static_cast<std::size_t>(outputs_[i])];
}

std::vector<double> Program::run(std::span<const double> vars) const
{
    std::vector<double> out(outputs_.size());
    run(vars, out);
    return out;
}

bool Program::try_run(std::span<const double> vars, std::span<double> out) const
{
    std::vector<double> regs;
    if (execute(vars, regs) >= 0) return false;
    for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = regs[static_cast<std::size_t>(outputs_[i])];
    return true;
}

} // namespace lagdeform
