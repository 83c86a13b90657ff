#include "charmat/fredholm.hpp"

#include <algorithm>

namespace charmat::fredholm {

void ProblemSpec::validate() const {
    if (m < 1 || n < 1 || r < 1)
        throw ContractError("ProblemSpec: dimensions m, n, r must be >= 1");
    if (!(a < b)) throw ContractError("ProblemSpec: interval start must be less than end");
    if (!(p >= 1.0)) throw ContractError("ProblemSpec: exponent must satisfy p >= 1");
    if (A.rows() != m || A.cols() != m)
        throw ContractError("ProblemSpec: coefficient matrix must be m x m");
    if (f.rows() != m || f.cols() != 1)
        throw ContractError("ProblemSpec: right-hand side must be an m-vector");
    if (c.size() != r) throw ContractError("ProblemSpec: boundary vector must have r entries");
    if (A.depends_on_eps() || f.depends_on_eps())
        throw ContractError("ProblemSpec: expressions must not reference eps; bind it first");
    if (num.nodes < 2) throw ContractError("ProblemSpec: at least 2 grid nodes required");
    B.validate(a, b, m, n, r);
}

namespace {

double rank_threshold(const Eigen::VectorXd& sigma, const NumericsConfig& num) {
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    return std::max(num.rank_rel_tol * sigma_max, num.rank_abs_floor);
}

struct Pipeline {
    Grid grid;
    SampledFunction A;   // layers 0..n-1
    SampledFunction f;   // layers 0..n-1
    SampledFunction Y;   // fundamental matrix, layers 0..n
};

Pipeline run_pipeline(const ProblemSpec& ps) {
    ps.validate();
    Grid grid = ps.make_grid();
    SampledFunction A = ps.A.sample(grid, 0.0, ps.n - 1);
    SampledFunction f = ps.f.sample(grid, 0.0, ps.n - 1);
    SampledFunction Y = integrator::fundamental_matrix(A, ps.ivp_config()).Y;
    return Pipeline{std::move(grid), std::move(A), std::move(f), std::move(Y)};
}

CharacteristicMatrix characteristic_from(const SampledFunction& Y, const ProblemSpec& ps) {
    CharacteristicMatrix cm;
    cm.M = boundary::apply(ps.B, Y);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cm.M);
    cm.singular_values = svd.singularValues();
    cm.rank_threshold = rank_threshold(cm.singular_values, ps.num);
    return cm;
}

}  // namespace

CharacteristicMatrix characteristic_matrix(const ProblemSpec& ps) {
    return characteristic_from(run_pipeline(ps).Y, ps);
}

SolvabilityReport analyze(const CharacteristicMatrix& cm, int m, int r) {
    SolvabilityReport rep;
    rep.rank_threshold = cm.rank_threshold;
    rep.rank = 0;
    for (Eigen::Index i = 0; i < cm.singular_values.size(); ++i)
        if (cm.singular_values(i) > cm.rank_threshold) ++rep.rank;
    rep.dim_ker = m - rep.rank;
    rep.dim_coker = r - rep.rank;
    rep.index = m - r;
    rep.sigma_min =
        cm.singular_values.size() > 0 ? cm.singular_values(cm.singular_values.size() - 1) : 0.0;
    rep.invertible = (r == m) && rep.rank == m;
    return rep;
}

SolvabilityReport analyze(const ProblemSpec& ps) {
    return analyze(characteristic_matrix(ps), ps.m, ps.r);
}

BvpSolution solve(const ProblemSpec& ps) {
    Pipeline pl = run_pipeline(ps);
    CharacteristicMatrix cm = characteristic_from(pl.Y, ps);
    SolvabilityReport rep = analyze(cm, ps.m, ps.r);

    SampledFunction y_p = integrator::particular_solution(pl.A, pl.f, ps.ivp_config());
    const Eigen::VectorXcd d = ps.c - boundary::apply(ps.B, y_p);

    Eigen::VectorXcd xi;
    std::vector<SampledFunction> kernel;
    if (rep.invertible) {
        xi = cm.M.colPivHouseholderQr().solve(d);
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cm.M,
                                               Eigen::ComputeFullU | Eigen::ComputeFullV);
        // Minimum-norm least-squares solution with small singular values dropped.
        const auto& sigma = svd.singularValues();
        xi = Eigen::VectorXcd::Zero(ps.m);
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
            if (sigma(i) <= cm.rank_threshold) continue;
            xi += (svd.matrixU().col(i).dot(d) / sigma(i)) * svd.matrixV().col(i);
        }
        for (Eigen::Index i = rep.rank; i < ps.m; ++i) {
            const Eigen::VectorXcd v = svd.matrixV().col(i);
            SampledFunction h(pl.grid, ps.m, 1, ps.n);
            for (int k = 0; k <= ps.n; ++k)
                for (int node = 0; node < pl.grid.size(); ++node)
                    h.value(k, node) = pl.Y.value(k, node) * v;
            kernel.push_back(std::move(h));
        }
    }

    BvpSolution sol{SampledFunction(pl.grid, ps.m, 1, ps.n), xi, std::move(kernel), 0.0,
                    rep.invertible, rep};
    for (int k = 0; k <= ps.n; ++k)
        for (int node = 0; node < pl.grid.size(); ++node)
            sol.y.value(k, node) = y_p.value(k, node) + pl.Y.value(k, node) * xi;
    sol.residual_boundary = (cm.M * xi - d).norm();
    return sol;
}

Residuals verify_solution(const ProblemSpec& ps, const SampledFunction& y) {
    ps.validate();
    if (y.order() < 1)
        throw ContractError("verify_solution: solution must carry at least one derivative layer");
    const Grid& grid = y.grid();
    const SampledFunction A = ps.A.sample(grid, 0.0, 0);
    const SampledFunction f = ps.f.sample(grid, 0.0, 0);
    Residuals res;
    for (int i = 0; i < grid.size(); ++i) {
        const Eigen::MatrixXcd r =
            y.value(1, i) + A.value(0, i) * y.value(0, i) - f.value(0, i);
        res.ode = std::max(res.ode, r.norm());
    }
    res.boundary = (boundary::apply(ps.B, y) - Eigen::MatrixXcd(ps.c)).norm();
    return res;
}

}  // namespace charmat::fredholm
