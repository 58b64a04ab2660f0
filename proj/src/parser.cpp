// Recursive-descent parser for the expression DSL:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' exponent)?
//   base   := number | ident | '(' expr ')' | func '(' expr ')'
//   exponent := '-'? number | '(' '-'? number ')'
//
// Unary minus binds looser than '^', so "-y1^2" is -(y1^2).

#include <cctype>
#include <charconv>

#include "lagdeform/errors.hpp"
#include "lagdeform/expr.hpp"

namespace lagdeform {

namespace {

class Parser {
public:
    Parser(std::string_view src, const std::set<std::string>& declared) : src_(src), declared_(declared) {}

    Expression run()
    {
        Expression e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' before end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expression expr()
    {
        Expression lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = lhs + term();
            else if (accept('-'))
                lhs = lhs - term();
            else
                return lhs;
        }
    }

    Expression term()
    {
        Expression lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = lhs * factor();
            else if (accept('/'))
                lhs = lhs / factor();
            else
                return lhs;
        }
    }

    Expression factor()
    {
        if (accept('-')) return -factor();
        Expression b = base();
        if (accept('^')) return pow(b, exponent());
        return b;
    }

    double exponent()
    {
        if (accept('(')) {
            const bool negative = accept('-');
            const double v = number();
            expect(')');
            return negative ? -v : v;
        }
        const bool negative = accept('-');
        const double v = number();
        return negative ? -v : v;
    }

    double number()
    {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && src_[start] == '.')) {
            pos_ = start;
            fail("expected number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) ++p;
                pos_ = p;
            }
        }
        double v = 0.0;
        const char* first = src_.data() + start;
        auto res = std::from_chars(first, src_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return v;
    }

    Expression base()
    {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expression(number());
        if (c == '(') {
            ++pos_;
            Expression e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            const std::string ident(src_.substr(start, pos_ - start));
            const std::size_t after = pos_;
            if (const Op* fn = function_op(ident); fn && accept('(')) {
                Expression arg = expr();
                expect(')');
                return apply_unary(*fn, arg);
            }
            pos_ = after;
            if (!declared_.count(ident)) throw UndeclaredIdentifier(ident, start);
            return Expression::variable(ident);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    static const Op* function_op(const std::string& name)
    {
        static const std::pair<const char*, Op> table[] = {
            {"exp", Op::Exp}, {"ln", Op::Ln}, {"sqrt", Op::Sqrt},
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"abs", Op::Abs},
        };
        for (const auto& [n, op] : table)
            if (name == n) return &op;
        return nullptr;
    }

    std::string_view src_;
    const std::set<std::string>& declared_;
    std::size_t pos_ = 0;
};

} // namespace

Expression parse(std::string_view source, const std::set<std::string>& declared)
{
    return Parser(source, declared).run();
}

} // namespace lagdeform
