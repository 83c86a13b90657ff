#pragma once

#include <Eigen/Dense>
#include <optional>

#include "charmat/fredholm.hpp"

namespace charmat::oracle {

using fredholm::ProblemSpec;
using funcspace::Grid;
using funcspace::SampledFunction;

/// Dense finite-difference discretization of the problem: one midpoint-rule
/// row block per grid cell plus r boundary rows, unknowns being the stacked
/// node values of y. Kept explicit so its rank structure can be inspected
/// directly.
struct CollocationSystem {
    Grid grid;
    Eigen::MatrixXcd matrix;  // (m*(N-1) + r) x (m*N)
    Eigen::VectorXcd rhs;
};

struct OracleResult {
    bool unique = false;
    std::optional<SampledFunction> solution;  // layers 0..n when unique
    int dim_ker = 0;
    int dim_coker = 0;
};

/// Builds the full dense collocation system on an N-node uniform grid
/// (N = ps.num.nodes unless overridden).
CollocationSystem assemble(const ProblemSpec& ps, int nodes_override = 0);

/// Kernel/cokernel dimensions of the dense system measured by singular value
/// decomposition with the problem's rank tolerance. The ODE block always has
/// full row rank, so the system defect equals the problem defect.
std::pair<int, int> dense_defect(const CollocationSystem& sys, const ProblemSpec& ps);

/// Solves the collocation system through structured block elimination
/// (algebraically the exact solution of the square dense system). Reports
/// the defect instead of values when the system is singular to tolerance.
OracleResult oracle_solve(const ProblemSpec& ps, int nodes_override = 0);

}  // namespace charmat::oracle
