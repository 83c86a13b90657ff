#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "charmat/errors.hpp"

namespace charmat::funcspace {

using Complex = std::complex<double>;

/// Partition of a finite interval [a,b], endpoints included, nodes strictly
/// increasing. Immutable; copies share the node storage.
class Grid {
public:
    Grid(double a, double b, std::vector<double> nodes);

    static Grid uniform(double a, double b, int num_nodes);

    double a() const { return data_->a; }
    double b() const { return data_->b; }
    int size() const { return static_cast<int>(data_->nodes.size()); }
    double node(int i) const { return data_->nodes[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const { return data_->nodes; }
    double length() const { return data_->b - data_->a; }

    /// Index i with node(i) <= t <= node(i+1), clamped to [0, size()-2].
    int find_cell(double t) const;

    /// Index of the node closest to t, or -1 if none is within `tol`.
    int snap_to_node(double t, double tol) const;

    /// Trapezoid quadrature weight of node i.
    double quad_weight(int i) const;

    bool same_nodes(const Grid& other) const;

private:
    struct Data {
        double a, b;
        std::vector<double> nodes;
    };
    std::shared_ptr<const Data> data_;
};

/// Smoothness order n >= 0 and integrability exponent p in [1, inf].
struct SobolevIndex {
    int n = 0;
    double p = 2.0;  // use infinity() for the sup norm

    SobolevIndex(int n_, double p_);
    bool p_is_inf() const;
    /// Conjugate exponent p' with 1/p + 1/p' = 1.
    double conjugate() const;
};

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Vector- or matrix-valued function sampled on a grid together with its
/// derivatives: layer k holds the k-th derivative at every node, k = 0..order.
class SampledFunction {
public:
    SampledFunction(Grid grid, int rows, int cols, int order);

    static SampledFunction zero(const Grid& grid, int rows, int cols, int order);

    const Grid& grid() const { return grid_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int order() const { return order_; }

    const Eigen::MatrixXcd& value(int layer, int node) const;
    Eigen::MatrixXcd& value(int layer, int node);

    /// Evaluates layer k at an arbitrary t in [a,b]: exact node value when t
    /// snaps to a node, cubic Hermite within the cell when layer k+1 is
    /// stored, 4-point cubic Lagrange otherwise.
    Eigen::MatrixXcd eval_layer_at(int layer, double t) const;

    bool same_shape(const SampledFunction& other) const;
    bool all_finite() const;

private:
    Grid grid_;
    int rows_, cols_, order_;
    std::vector<std::vector<Eigen::MatrixXcd>> layers_;  // [layer][node]
};

/// Weights of 4-point cubic Lagrange interpolation at t; `first` is the index
/// of the first stencil node. Falls back to the full stencil clamped to the
/// grid edges. For grids with fewer than 4 nodes the stencil shrinks.
struct InterpStencil {
    int first = 0;
    int count = 0;
    double w[4] = {0, 0, 0, 0};
};
InterpStencil interp_stencil(const Grid& grid, double t);

/// Pointwise magnitude entering L_p integrands: Euclidean norm for vectors,
/// spectral norm for matrices. For p = inf, vectors use the max component
/// magnitude instead.
double pointwise_magnitude(const Eigen::MatrixXcd& v, bool inf_norm);

/// L_p norm of one derivative layer: composite trapezoid of |f|^p for finite
/// p, max over nodes for p = inf.
double lp_norm(const SampledFunction& f, int layer, double p);

/// Sum of lp_norm over layers 0..idx.n.
double sobolev_norm(const SampledFunction& y, const SobolevIndex& idx);

/// Layer-wise difference y1 - y2; grids, shapes and orders must agree.
SampledFunction function_difference(const SampledFunction& y1, const SampledFunction& y2);

}  // namespace charmat::funcspace
