#include "charmat/integrator.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace charmat::integrator {

namespace {

// Binomial coefficients up to the modest derivative orders used here.
double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
    return acc;
}

class RhsField {
public:
    RhsField(const SampledFunction& A, const SampledFunction* f, int cols)
        : A_(A), f_(f), cols_(cols) {}

    Eigen::MatrixXcd operator()(double t, const Eigen::MatrixXcd& y) const {
        Eigen::MatrixXcd rhs = -A_.eval_layer_at(0, t) * y;
        if (f_) rhs += f_->eval_layer_at(0, t);
        return rhs;
    }

    Eigen::MatrixXcd zero() const { return Eigen::MatrixXcd::Zero(A_.rows(), cols_); }

private:
    const SampledFunction& A_;
    const SampledFunction* f_;
    int cols_;
};

void check_coefficients(const SampledFunction& A, const SampledFunction* f) {
    if (A.rows() != A.cols()) throw ContractError("solve_ivp: coefficient matrix must be square");
    if (f) {
        if (!A.grid().same_nodes(f->grid()))
            throw ContractError("solve_ivp: coefficient and right-hand side grids differ");
        if (f->rows() != A.rows())
            throw ContractError("solve_ivp: right-hand side row count does not match system size");
        if (f->order() < A.order())
            throw ContractError("solve_ivp: right-hand side carries fewer derivative layers "
                                "than the coefficient matrix");
    }
}

// Classical RK4 across one cell with `substeps` equal steps.
Eigen::MatrixXcd advance_cell(const RhsField& rhs, double t0, double t1, Eigen::MatrixXcd y,
                              int substeps) {
    const double h = (t1 - t0) / substeps;
    for (int s = 0; s < substeps; ++s) {
        const double t = t0 + s * h;
        const Eigen::MatrixXcd k1 = rhs(t, y);
        const Eigen::MatrixXcd k2 = rhs(t + h / 2, y + (h / 2) * k1);
        const Eigen::MatrixXcd k3 = rhs(t + h / 2, y + (h / 2) * k2);
        const Eigen::MatrixXcd k4 = rhs(s + 1 == substeps ? t1 : t + h, y + h * k3);
        y += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
}

std::vector<Eigen::MatrixXcd> integrate_nodes(const SampledFunction& A, const SampledFunction* f,
                                              const Eigen::MatrixXcd& y0, int substeps) {
    const Grid& grid = A.grid();
    RhsField rhs(A, f, static_cast<int>(y0.cols()));
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(static_cast<std::size_t>(grid.size()));
    out.push_back(y0);
    for (int i = 0; i + 1 < grid.size(); ++i) {
        Eigen::MatrixXcd next =
            advance_cell(rhs, grid.node(i), grid.node(i + 1), out.back(), substeps);
        if (!next.allFinite()) {
            std::ostringstream os;
            os << "integration diverged near t=" << grid.node(i + 1) << " (node " << i + 1 << ")";
            throw DivergenceError(os.str());
        }
        out.push_back(std::move(next));
    }
    return out;
}

}  // namespace

SampledFunction derivative_stack(const SampledFunction& y_layer0, const SampledFunction& A,
                                 const SampledFunction& f, int n) {
    if (n < 0) throw ContractError("derivative_stack: order must be >= 0");
    if (n > 0 && (A.order() < n - 1 || f.order() < n - 1))
        throw ContractError("derivative_stack: coefficient layers to order " +
                            std::to_string(n - 1) + " required");
    const Grid& grid = y_layer0.grid();
    SampledFunction y(grid, y_layer0.rows(), y_layer0.cols(), n);
    for (int i = 0; i < grid.size(); ++i) y.value(0, i) = y_layer0.value(0, i);
    for (int k = 0; k + 1 <= n; ++k) {
        for (int i = 0; i < grid.size(); ++i) {
            Eigen::MatrixXcd next = f.value(k, i);
            for (int j = 0; j <= k; ++j)
                next -= binomial(k, j) * A.value(j, i) * y.value(k - j, i);
            y.value(k + 1, i) = std::move(next);
        }
    }
    return y;
}

SampledFunction solve_ivp(const SampledFunction& A, const SampledFunction& f,
                          const Eigen::MatrixXcd& y0, const IvpConfig& config) {
    check_coefficients(A, &f);
    if (y0.rows() != A.rows())
        throw ContractError("solve_ivp: initial value size does not match system size");
    if (f.cols() != y0.cols())
        throw ContractError("solve_ivp: right-hand side column count does not match state");
    if (config.substeps < 1) throw ContractError("solve_ivp: substeps must be >= 1");

    const auto nodes = integrate_nodes(A, &f, y0, config.substeps);
    SampledFunction layer0(A.grid(), static_cast<int>(y0.rows()), static_cast<int>(y0.cols()), 0);
    for (int i = 0; i < A.grid().size(); ++i) layer0.value(0, i) = nodes[static_cast<std::size_t>(i)];
    return derivative_stack(layer0, A, f, A.order() + 1);
}

FundamentalMatrix fundamental_matrix(const SampledFunction& A, const IvpConfig& config) {
    check_coefficients(A, nullptr);
    if (config.substeps < 1) throw ContractError("fundamental_matrix: substeps must be >= 1");
    const int m = A.rows();
    const auto nodes =
        integrate_nodes(A, nullptr, Eigen::MatrixXcd::Identity(m, m), config.substeps);
    SampledFunction layer0(A.grid(), m, m, 0);
    for (int i = 0; i < A.grid().size(); ++i) layer0.value(0, i) = nodes[static_cast<std::size_t>(i)];
    SampledFunction zero_rhs = SampledFunction::zero(A.grid(), m, m, A.order());
    return FundamentalMatrix{derivative_stack(layer0, A, zero_rhs, A.order() + 1), config};
}

SampledFunction particular_solution(const SampledFunction& A, const SampledFunction& f,
                                    const IvpConfig& config) {
    return solve_ivp(A, f, Eigen::MatrixXcd::Zero(A.rows(), f.cols()), config);
}

double step_doubling_delta(const SampledFunction& A, const SampledFunction& f,
                           const Eigen::MatrixXcd& y0, const IvpConfig& config) {
    const auto coarse = integrate_nodes(A, &f, y0, config.substeps);
    const auto fine = integrate_nodes(A, &f, y0, config.substeps * 2);
    return (coarse.back() - fine.back()).norm();
}

}  // namespace charmat::integrator
