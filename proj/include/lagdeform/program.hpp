#pragma once

#include <span>
#include <string>
#include <vector>

#include "lagdeform/expr.hpp"

namespace lagdeform {

/// A batch of expressions compiled to straight-line code over a fixed
/// variable ordering. Shared subtrees are evaluated once. Values are
/// bit-identical to `evaluate` on the same inputs.
class Program {
public:
    Program() = default;
    Program(const std::vector<Expression>& outputs, std::vector<std::string> variables);

    std::size_t output_count() const noexcept { return outputs_.size(); }
    std::size_t variable_count() const noexcept { return variables_.size(); }
    const std::vector<std::string>& variables() const noexcept { return variables_; }

    /// Throws DomainViolation naming the failing subexpression.
    void run(std::span<const double> vars, std::span<double> out) const;
    std::vector<double> run(std::span<const double> vars) const;

    /// Same as run but reports a domain violation by returning false.
    bool try_run(std::span<const double> vars, std::span<double> out) const;

private:
    struct Instr {
        Op op;
        int a;
        int b;
        double value;
    };

    int execute(std::span<const double> vars, std::vector<double>& regs) const;

    std::vector<Instr> code_;
    std::vector<Expression> sources_;
    std::vector<int> outputs_;
    std::vector<std::string> variables_;
};

} // namespace lagdeform
