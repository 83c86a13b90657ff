#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "charmat/errors.hpp"
#include "charmat/funcspace.hpp"

namespace charmat::exprs {

using Complex = std::complex<double>;

/// Immutable scalar expression in the variable t and the parameter eps.
///
/// Grammar (whitespace ignored, '^' right-associative, exponents must be
/// constant):
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := unary ('^' factor)?
///   unary  := '-' unary | atom
///   atom   := number | 't' | 'eps' | ident '(' expr ')' | '(' expr ')'
/// with ident one of sin, cos, exp, log, sqrt, abs, sign.
class Expression {
public:
    /// Constant zero.
    Expression();

    static Expression parse(std::string_view text);
    static Expression literal(double value);
    static Expression var_t();
    static Expression var_eps();

    Expression operator+(const Expression& rhs) const;
    Expression operator-(const Expression& rhs) const;
    Expression operator*(const Expression& rhs) const;
    Expression operator/(const Expression& rhs) const;
    Expression operator-() const;
    Expression pow(double exponent) const;
    static Expression apply(std::string_view func, const Expression& arg);

    Complex eval(double t, double eps = 0.0) const;

    /// d/dt by structural rules; eps is treated as a constant.
    Expression derivative() const;

    /// Replaces eps by a literal and refolds constants.
    Expression bind_eps(double eps) const;

    bool depends_on_t() const;
    bool depends_on_eps() const;
    bool is_literal_zero() const;

    /// Unambiguous fully parenthesized form; parse(to_string()) evaluates
    /// identically.
    std::string to_string() const;

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;
    explicit Expression(NodePtr root) : root_(std::move(root)) {}
    const NodePtr& root() const { return root_; }

private:
    NodePtr root_;
};

/// Row-major matrix of scalar expressions; represents A(t), f(t) or a
/// boundary kernel.
class MatrixExpression {
public:
    MatrixExpression(int rows, int cols, std::vector<Expression> entries);

    static MatrixExpression zero(int rows, int cols);
    static MatrixExpression constant(const Eigen::MatrixXd& values);
    /// Parses every string of a row-major list.
    static MatrixExpression parse(int rows, int cols, const std::vector<std::string>& texts);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Expression& entry(int i, int j) const;

    Eigen::MatrixXcd eval(double t, double eps = 0.0) const;
    MatrixExpression derivative() const;
    MatrixExpression bind_eps(double eps) const;
    bool depends_on_eps() const;

    /// Samples the matrix and its first `order` t-derivatives at every grid
    /// node. Evaluation faults are rethrown with the node location attached.
    funcspace::SampledFunction sample(const funcspace::Grid& grid, double eps, int order) const;

private:
    int rows_, cols_;
    std::vector<Expression> entries_;
};

}  // namespace charmat::exprs
