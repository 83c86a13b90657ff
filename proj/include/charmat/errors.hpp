#pragma once

#include <stdexcept>
#include <string>

namespace charmat {

/// Violated precondition or shape/contract mismatch between inputs.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

/// Expression text could not be parsed; `position` is the byte offset of the
/// first offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Arithmetic fault while evaluating an expression (division by zero, log of
/// zero, ...). The message names the offending subexpression and point.
class EvalDomainError : public std::runtime_error {
public:
    explicit EvalDomainError(const std::string& what) : std::runtime_error(what) {}
};

/// The initial-value integration produced non-finite values.
class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace charmat
