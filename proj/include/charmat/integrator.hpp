#pragma once

#include <Eigen/Dense>

#include "charmat/funcspace.hpp"

namespace charmat::integrator {

using funcspace::Grid;
using funcspace::SampledFunction;

/// Fixed-step classical 4th-order Runge-Kutta configuration. `substeps` are
/// taken inside every grid cell; `tolerance` is the target for the
/// step-doubling self-check, not an adaptivity control.
struct IvpConfig {
    int substeps = 1;
    double tolerance = 1e-10;
};

/// Solution of the homogeneous matrix equation Y' + A Y = 0, Y(a) = I.
struct FundamentalMatrix {
    SampledFunction Y;
    IvpConfig config;
};

/// Integrates y' + A(t) y = f(t), y(a) = y0, over the grid carried by A.
/// The state may be a matrix (y0 with several columns); f must then have the
/// same column count or be empty (interpreted as zero). Derivative layers
/// 1..order(A)+1 are filled from the algebraic recurrence.
SampledFunction solve_ivp(const SampledFunction& A, const SampledFunction& f,
                          const Eigen::MatrixXcd& y0, const IvpConfig& config);

FundamentalMatrix fundamental_matrix(const SampledFunction& A, const IvpConfig& config);

/// solve_ivp with zero initial value; the particular solution vanishing at a.
SampledFunction particular_solution(const SampledFunction& A, const SampledFunction& f,
                                    const IvpConfig& config);

/// Fills layers 1..n of `y` node-wise from
///   y^(k+1) = f^(k) - sum_{i=0..k} C(k,i) A^(i) y^(k-i),
/// which holds identically for solutions of y' + A y = f. Layer 0 of `y` is
/// taken as given; A and f must carry layers to order n-1.
SampledFunction derivative_stack(const SampledFunction& y_layer0, const SampledFunction& A,
                                 const SampledFunction& f, int n);

/// |y(b)| difference between runs with `config.substeps` and twice as many;
/// used by the order self-check.
double step_doubling_delta(const SampledFunction& A, const SampledFunction& f,
                           const Eigen::MatrixXcd& y0, const IvpConfig& config);

}  // namespace charmat::integrator
