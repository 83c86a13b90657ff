#pragma once

#include <Eigen/Dense>
#include <vector>

#include "charmat/boundary.hpp"
#include "charmat/exprs.hpp"
#include "charmat/funcspace.hpp"
#include "charmat/integrator.hpp"

namespace charmat::fredholm {

using funcspace::Grid;
using funcspace::SampledFunction;

struct NumericsConfig {
    int nodes = 1025;
    int substeps = 1;
    double ivp_tolerance = 1e-10;
    double rank_rel_tol = 1e-8;    // relative to the largest singular value
    double rank_abs_floor = 1e-12; // rank threshold never drops below this
};

/// Data of the boundary-value problem y' + A(t) y = f(t), By = c on [a,b].
/// Expressions are functions of t only; parameter families bind eps before
/// constructing a ProblemSpec.
struct ProblemSpec {
    double a = 0.0, b = 1.0;
    int m = 1;       // system size
    int n = 1;       // smoothness order of the solution space
    int r = 1;       // number of scalar boundary conditions
    double p = 2.0;  // integrability exponent (may be infinity)
    exprs::MatrixExpression A = exprs::MatrixExpression::zero(1, 1);
    exprs::MatrixExpression f = exprs::MatrixExpression::zero(1, 1);
    boundary::BoundaryOperator B;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(1);
    NumericsConfig num;

    void validate() const;
    Grid make_grid() const { return Grid::uniform(a, b, num.nodes); }
    integrator::IvpConfig ivp_config() const { return {num.substeps, num.ivp_tolerance}; }
    funcspace::SobolevIndex sobolev_index() const { return {n, p}; }
};

/// Finite matrix whose j-th column is the boundary operator applied to the
/// j-th column of the fundamental matrix; r rows, m columns.
struct CharacteristicMatrix {
    Eigen::MatrixXcd M;
    Eigen::VectorXd singular_values;  // nonincreasing
    double rank_threshold = 0.0;
};

struct SolvabilityReport {
    int rank = 0;
    int dim_ker = 0;    // m - rank
    int dim_coker = 0;  // r - rank
    int index = 0;      // m - r = dim_ker - dim_coker
    bool invertible = false;
    double sigma_min = 0.0;
    double rank_threshold = 0.0;
};

struct BvpSolution {
    SampledFunction y;                        // layers 0..n
    Eigen::VectorXcd xi;                      // superposition coefficients
    std::vector<SampledFunction> kernel_basis;  // homogeneous solutions, size dim_ker
    double residual_boundary = 0.0;           // |M xi - d|
    bool unique = false;
    SolvabilityReport report;
};

CharacteristicMatrix characteristic_matrix(const ProblemSpec& ps);

SolvabilityReport analyze(const CharacteristicMatrix& cm, int m, int r);
SolvabilityReport analyze(const ProblemSpec& ps);

/// Superposition solve. Nondegenerate problems are solved by column-pivoted
/// QR; degenerate ones return the minimum-norm least-squares solution
/// together with a kernel basis, never an error.
BvpSolution solve(const ProblemSpec& ps);

struct Residuals {
    double ode = 0.0;       // max node |y' + A y - f| from layer 1
    double boundary = 0.0;  // |B y - c|
};
Residuals verify_solution(const ProblemSpec& ps, const SampledFunction& y);

}  // namespace charmat::fredholm
