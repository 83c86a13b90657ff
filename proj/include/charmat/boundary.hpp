#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>
#include <vector>

#include "charmat/exprs.hpp"
#include "charmat/funcspace.hpp"

namespace charmat::boundary {

using funcspace::SampledFunction;

/// Boundary functional in the form
///   By = sum_{k=0}^{n-1} alpha_k y^(k)(a) + integral_a^b Phi(t) y^(n)(t) dt,
/// with r x m matrices alpha_k and an r x m kernel Phi. Representable for any
/// number of rows r.
struct CanonicalBoundary {
    std::vector<Eigen::MatrixXcd> alphas;  // exactly n matrices, k = 0..n-1
    exprs::MatrixExpression phi;           // r x m kernel

    int rows() const { return static_cast<int>(phi.rows()); }
    int cols() const { return phi.cols(); }
    int order() const { return static_cast<int>(alphas.size()); }  // = n
};

/// One point term of a multipoint condition: matrices beta^(l), l = 0..n,
/// acting on y^(l)(point).
struct PointTerm {
    double point = 0.0;
    std::vector<Eigen::MatrixXcd> betas;  // exactly n+1 matrices, all m x m
};

/// Group of point terms sharing a limit point (groups j = 1..r); group 0 has
/// no limit point. The operator value is the flat sum over every term of
/// every group:
///   By = sum_j sum_k sum_l beta_{j,k}^(l) y^(l)(t_{j,k}).
/// Only the square case (r groups, m x m matrices, r = m) is representable.
struct PointGroup {
    std::optional<double> limit_point;
    std::vector<PointTerm> terms;
};

struct MultipointBoundary {
    int m = 0;
    int n = 0;
    std::vector<PointGroup> groups;  // size r+1; index 0 is the free group

    int rows() const { return static_cast<int>(groups.size()) - 1; }  // = r = m
};

class BoundaryOperator {
public:
    /// Scalar first-order Cauchy operator By = y(a).
    BoundaryOperator();
    explicit BoundaryOperator(CanonicalBoundary canonical);
    explicit BoundaryOperator(MultipointBoundary multipoint);

    bool is_canonical() const { return std::holds_alternative<CanonicalBoundary>(form_); }
    bool is_multipoint() const { return std::holds_alternative<MultipointBoundary>(form_); }
    const CanonicalBoundary& canonical() const;
    const MultipointBoundary& multipoint() const;

    /// Number of scalar conditions r.
    int rows() const;
    /// System dimension m the operator acts on.
    int cols() const;
    /// Highest derivative layer the operator reads (n for both forms).
    int order() const;

    /// Throws unless every point lies inside [a,b] and shapes are consistent.
    void validate(double a, double b, int m, int n, int r) const;

private:
    std::variant<CanonicalBoundary, MultipointBoundary> form_;
};

/// Applies the operator to a sampled function carrying derivative layers to
/// order n. Matrix-valued input is handled column-wise, so the result has one
/// column per input column (apply to a fundamental matrix yields the full
/// r x m characteristic matrix in one call).
Eigen::MatrixXcd apply(const BoundaryOperator& op, const SampledFunction& y);

/// Classical two-point condition B_a y(a) + B_b y(b); both matrices m x m.
BoundaryOperator two_point(const Eigen::MatrixXcd& B_a, const Eigen::MatrixXcd& B_b, double a,
                           double b, int n);

/// Conservative norm bound: |apply(op, y)| <= continuity_bound(op, grid) *
/// ||y||_{n,inf} up to interpolation slack.
double continuity_bound(const BoundaryOperator& op, const funcspace::Grid& grid);

}  // namespace charmat::boundary
