#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lagdeform {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UndeclaredIdentifier : public Error {
public:
    UndeclaredIdentifier(const std::string& name, std::size_t offset)
        : Error("undeclared identifier '" + name + "' at offset " + std::to_string(offset)),
          name_(name), offset_(offset) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name)
        : Error("no binding for variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// Raised when an expression is evaluated outside its domain. Samplers treat
// this as "reject the point", not as a fatal condition.
class DomainViolation : public Error {
public:
    explicit DomainViolation(const std::string& subexpression)
        : Error("domain violation in " + subexpression), subexpression_(subexpression) {}
    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class GuardViolation : public Error {
public:
    using Error::Error;
};

class TooManyRejections : public Error {
public:
    TooManyRejections(std::size_t accepted, std::size_t attempted)
        : Error("too many rejected samples: accepted " + std::to_string(accepted) + " of " +
                std::to_string(attempted) + " draws"),
          accepted_(accepted), attempted_(attempted) {}
    std::size_t accepted() const noexcept { return accepted_; }
    std::size_t attempted() const noexcept { return attempted_; }

private:
    std::size_t accepted_;
    std::size_t attempted_;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class NotHomogeneous : public Error {
public:
    using Error::Error;
};

class DomainConflict : public Error {
public:
    using Error::Error;
};

class OutOfInterval : public Error {
public:
    OutOfInterval(double t, double lo, double hi)
        : Error("argument " + std::to_string(t) + " outside deformation interval [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]") {}
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class TooShort : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& reason)
        : Error("schema error in '" + field + "': " + reason), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace lagdeform
