#include "charmat/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace charmat::funcspace {

Grid::Grid(double a, double b, std::vector<double> nodes) {
    if (!(a < b)) throw ContractError("Grid: interval start must be less than end");
    if (nodes.size() < 2) throw ContractError("Grid: at least 2 nodes required");
    if (nodes.front() != a || nodes.back() != b)
        throw ContractError("Grid: nodes must start at a and end at b");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i - 1] < nodes[i]))
            throw ContractError("Grid: nodes must be strictly increasing");
    data_ = std::make_shared<Data>(Data{a, b, std::move(nodes)});
}

Grid Grid::uniform(double a, double b, int num_nodes) {
    if (num_nodes < 2) throw ContractError("Grid::uniform: at least 2 nodes required");
    std::vector<double> nodes(static_cast<std::size_t>(num_nodes));
    const double h = (b - a) / (num_nodes - 1);
    for (int i = 0; i < num_nodes; ++i) nodes[static_cast<std::size_t>(i)] = a + h * i;
    nodes.front() = a;
    nodes.back() = b;
    return Grid(a, b, std::move(nodes));
}

int Grid::find_cell(double t) const {
    const auto& xs = data_->nodes;
    auto it = std::upper_bound(xs.begin(), xs.end(), t);
    int i = static_cast<int>(it - xs.begin()) - 1;
    return std::clamp(i, 0, size() - 2);
}

int Grid::snap_to_node(double t, double tol) const {
    int cell = find_cell(t);
    for (int i : {cell, cell + 1}) {
        if (std::abs(t - node(i)) <= tol) return i;
    }
    return -1;
}

double Grid::quad_weight(int i) const {
    const int n = size();
    if (i == 0) return (node(1) - node(0)) / 2.0;
    if (i == n - 1) return (node(n - 1) - node(n - 2)) / 2.0;
    return (node(i + 1) - node(i - 1)) / 2.0;
}

bool Grid::same_nodes(const Grid& other) const {
    if (data_ == other.data_) return true;
    return data_->nodes == other.data_->nodes;
}

SobolevIndex::SobolevIndex(int n_, double p_) : n(n_), p(p_) {
    if (n < 0) throw ContractError("SobolevIndex: smoothness order must be >= 0");
    if (!(p >= 1.0)) throw ContractError("SobolevIndex: exponent must satisfy p >= 1");
}

bool SobolevIndex::p_is_inf() const { return std::isinf(p); }

double SobolevIndex::conjugate() const {
    if (p == 1.0) return kInfExponent;
    if (p_is_inf()) return 1.0;
    return p / (p - 1.0);
}

SampledFunction::SampledFunction(Grid grid, int rows, int cols, int order)
    : grid_(std::move(grid)), rows_(rows), cols_(cols), order_(order) {
    if (rows_ < 1 || cols_ < 1) throw ContractError("SampledFunction: shape must be at least 1x1");
    if (order_ < 0) throw ContractError("SampledFunction: order must be >= 0");
    layers_.resize(static_cast<std::size_t>(order_) + 1);
    for (auto& layer : layers_)
        layer.assign(static_cast<std::size_t>(grid_.size()), Eigen::MatrixXcd::Zero(rows_, cols_));
}

SampledFunction SampledFunction::zero(const Grid& grid, int rows, int cols, int order) {
    return SampledFunction(grid, rows, cols, order);
}

const Eigen::MatrixXcd& SampledFunction::value(int layer, int node) const {
    if (layer < 0 || layer > order_)
        throw ContractError("SampledFunction: derivative layer " + std::to_string(layer) +
                            " not stored (order " + std::to_string(order_) + ")");
    return layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(node)];
}

Eigen::MatrixXcd& SampledFunction::value(int layer, int node) {
    if (layer < 0 || layer > order_)
        throw ContractError("SampledFunction: derivative layer " + std::to_string(layer) +
                            " not stored (order " + std::to_string(order_) + ")");
    return layers_[static_cast<std::size_t>(layer)][static_cast<std::size_t>(node)];
}

InterpStencil interp_stencil(const Grid& grid, double t) {
    InterpStencil st;
    const int n = grid.size();
    st.count = std::min(4, n);
    int cell = grid.find_cell(t);
    st.first = std::clamp(cell - 1, 0, n - st.count);
    for (int j = 0; j < st.count; ++j) {
        double w = 1.0;
        const double xj = grid.node(st.first + j);
        for (int i = 0; i < st.count; ++i) {
            if (i == j) continue;
            const double xi = grid.node(st.first + i);
            w *= (t - xi) / (xj - xi);
        }
        st.w[j] = w;
    }
    return st;
}

Eigen::MatrixXcd SampledFunction::eval_layer_at(int layer, double t) const {
    if (layer < 0 || layer > order_)
        throw ContractError("SampledFunction: derivative layer " + std::to_string(layer) +
                            " not stored (order " + std::to_string(order_) + ")");
    if (t < grid_.a() || t > grid_.b()) {
        std::ostringstream os;
        os << "SampledFunction: evaluation point " << t << " outside [" << grid_.a() << ", "
           << grid_.b() << "]";
        throw ContractError(os.str());
    }
    const double snap_tol = 1e-12 * grid_.length();
    if (int i = grid_.snap_to_node(t, snap_tol); i >= 0) return value(layer, i);

    if (layer + 1 <= order_) {
        // Cubic Hermite on the bracketing cell from the stored derivative layer.
        const int i = grid_.find_cell(t);
        const double x0 = grid_.node(i), x1 = grid_.node(i + 1);
        const double h = x1 - x0, s = (t - x0) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        return h00 * value(layer, i) + (h10 * h) * value(layer + 1, i) +
               h01 * value(layer, i + 1) + (h11 * h) * value(layer + 1, i + 1);
    }
    const InterpStencil st = interp_stencil(grid_, t);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows_, cols_);
    for (int j = 0; j < st.count; ++j) out += st.w[j] * value(layer, st.first + j);
    return out;
}

bool SampledFunction::same_shape(const SampledFunction& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && order_ == other.order_ &&
           grid_.same_nodes(other.grid_);
}

bool SampledFunction::all_finite() const {
    for (const auto& layer : layers_)
        for (const auto& v : layer)
            if (!v.allFinite()) return false;
    return true;
}

double pointwise_magnitude(const Eigen::MatrixXcd& v, bool inf_norm) {
    if (v.cols() == 1) {
        return inf_norm ? v.cwiseAbs().maxCoeff() : v.norm();
    }
    if (v.rows() == 1) {
        return inf_norm ? v.cwiseAbs().maxCoeff() : v.norm();
    }
    // Spectral norm for matrix values.
    return v.jacobiSvd().singularValues()(0);
}

double lp_norm(const SampledFunction& f, int layer, double p) {
    if (layer < 0 || layer > f.order())
        throw ContractError("lp_norm: derivative layer " + std::to_string(layer) +
                            " not stored (order " + std::to_string(f.order()) + ")");
    if (!(p >= 1.0)) throw ContractError("lp_norm: exponent must satisfy p >= 1");
    const Grid& g = f.grid();
    if (std::isinf(p)) {
        double m = 0.0;
        for (int i = 0; i < g.size(); ++i)
            m = std::max(m, pointwise_magnitude(f.value(layer, i), true));
        return m;
    }
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double mag = pointwise_magnitude(f.value(layer, i), false);
        acc += g.quad_weight(i) * std::pow(mag, p);
    }
    return std::pow(acc, 1.0 / p);
}

double sobolev_norm(const SampledFunction& y, const SobolevIndex& idx) {
    if (y.order() < idx.n)
        throw ContractError("sobolev_norm: function stores derivatives to order " +
                            std::to_string(y.order()) + " but the norm requires order " +
                            std::to_string(idx.n));
    double acc = 0.0;
    for (int k = 0; k <= idx.n; ++k) acc += lp_norm(y, k, idx.p);
    return acc;
}

SampledFunction function_difference(const SampledFunction& y1, const SampledFunction& y2) {
    if (!y1.same_shape(y2))
        throw ContractError("function_difference: operands differ in grid, shape or order");
    SampledFunction out(y1.grid(), y1.rows(), y1.cols(), y1.order());
    for (int k = 0; k <= y1.order(); ++k)
        for (int i = 0; i < y1.grid().size(); ++i)
            out.value(k, i) = y1.value(k, i) - y2.value(k, i);
    return out;
}

}  // namespace charmat::funcspace
