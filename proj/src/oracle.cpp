#include "charmat/oracle.hpp"

#include <cmath>
#include <vector>

namespace charmat::oracle {

namespace {

double binomial(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
    return acc;
}

// Affine reduction of derivative layers to node values: on solutions of
// y' + A y = f one has y^(l)(t) = P_l(t) y(t) + g_l(t) with
//   P_0 = I, g_0 = 0,
//   P_{k+1} = -sum_i C(k,i) A^(i) P_{k-i},
//   g_{k+1} = f^(k) - sum_i C(k,i) A^(i) g_{k-i}.
struct LayerReduction {
    // [layer][node]
    std::vector<std::vector<Eigen::MatrixXcd>> P;
    std::vector<std::vector<Eigen::VectorXcd>> g;
};

LayerReduction layer_reduction(const SampledFunction& A, const SampledFunction& f, int n) {
    const int N = A.grid().size();
    const int m = A.rows();
    LayerReduction red;
    red.P.assign(static_cast<std::size_t>(n) + 1,
                 std::vector<Eigen::MatrixXcd>(static_cast<std::size_t>(N)));
    red.g.assign(static_cast<std::size_t>(n) + 1,
                 std::vector<Eigen::VectorXcd>(static_cast<std::size_t>(N)));
    for (int i = 0; i < N; ++i) {
        red.P[0][static_cast<std::size_t>(i)] = Eigen::MatrixXcd::Identity(m, m);
        red.g[0][static_cast<std::size_t>(i)] = Eigen::VectorXcd::Zero(m);
    }
    for (int k = 0; k + 1 <= n; ++k) {
        for (int i = 0; i < N; ++i) {
            Eigen::MatrixXcd Pn = Eigen::MatrixXcd::Zero(m, m);
            Eigen::VectorXcd gn = f.value(k, i).col(0);
            for (int j = 0; j <= k; ++j) {
                const double ckj = binomial(k, j);
                Pn -= ckj * A.value(j, i) * red.P[static_cast<std::size_t>(k - j)]
                                                 [static_cast<std::size_t>(i)];
                gn -= ckj * A.value(j, i) * red.g[static_cast<std::size_t>(k - j)]
                                                 [static_cast<std::size_t>(i)];
            }
            red.P[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(i)] = std::move(Pn);
            red.g[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(i)] = std::move(gn);
        }
    }
    return red;
}

// Boundary functional written as  By = sum_i W_i y_i + offset.
struct BoundaryRows {
    std::vector<Eigen::MatrixXcd> W;  // per node, r x m
    Eigen::VectorXcd offset;
};

BoundaryRows boundary_rows(const ProblemSpec& ps, const Grid& grid, const SampledFunction& A,
                           const SampledFunction& f) {
    const int N = grid.size();
    const int m = ps.m, r = ps.r, n = ps.n;
    const LayerReduction red = layer_reduction(A, f, n);

    BoundaryRows rows;
    rows.W.assign(static_cast<std::size_t>(N), Eigen::MatrixXcd::Zero(r, m));
    rows.offset = Eigen::VectorXcd::Zero(r);

    auto add_point_layer = [&](const Eigen::MatrixXcd& coef, int layer, double t) {
        const double snap_tol = 1e-12 * grid.length();
        const int snapped = grid.snap_to_node(t, snap_tol);
        if (snapped >= 0) {
            rows.W[static_cast<std::size_t>(snapped)] +=
                coef * red.P[static_cast<std::size_t>(layer)][static_cast<std::size_t>(snapped)];
            rows.offset +=
                coef * red.g[static_cast<std::size_t>(layer)][static_cast<std::size_t>(snapped)];
            return;
        }
        const funcspace::InterpStencil st = funcspace::interp_stencil(grid, t);
        for (int j = 0; j < st.count; ++j) {
            const int node = st.first + j;
            rows.W[static_cast<std::size_t>(node)] +=
                st.w[j] * coef * red.P[static_cast<std::size_t>(layer)][static_cast<std::size_t>(node)];
            rows.offset +=
                st.w[j] * coef * red.g[static_cast<std::size_t>(layer)][static_cast<std::size_t>(node)];
        }
    };

    if (ps.B.is_canonical()) {
        const auto& cb = ps.B.canonical();
        for (int k = 0; k < n; ++k)
            add_point_layer(cb.alphas[static_cast<std::size_t>(k)], k, grid.a());
        for (int i = 0; i < N; ++i) {
            const Eigen::MatrixXcd coef = grid.quad_weight(i) * cb.phi.eval(grid.node(i));
            rows.W[static_cast<std::size_t>(i)] +=
                coef * red.P[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
            rows.offset += coef * red.g[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
        }
    } else {
        for (const auto& group : ps.B.multipoint().groups)
            for (const auto& term : group.terms)
                for (int l = 0; l <= n; ++l) {
                    const auto& beta = term.betas[static_cast<std::size_t>(l)];
                    if (beta.isZero(0.0)) continue;
                    add_point_layer(beta, l, term.point);
                }
    }
    return rows;
}

struct CellScheme {
    // (I/h + A_mid/2) y_{i+1} = (I/h - A_mid/2) y_i + f_mid
    std::vector<Eigen::MatrixXcd> lhs;   // per cell
    std::vector<Eigen::MatrixXcd> rhsm;  // per cell
    std::vector<Eigen::VectorXcd> fmid;  // per cell
};

CellScheme cell_scheme(const ProblemSpec& ps, const Grid& grid) {
    const int cells = grid.size() - 1;
    const int m = ps.m;
    CellScheme cs;
    cs.lhs.reserve(static_cast<std::size_t>(cells));
    cs.rhsm.reserve(static_cast<std::size_t>(cells));
    cs.fmid.reserve(static_cast<std::size_t>(cells));
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
    for (int i = 0; i < cells; ++i) {
        const double h = grid.node(i + 1) - grid.node(i);
        const double tm = 0.5 * (grid.node(i) + grid.node(i + 1));
        const Eigen::MatrixXcd Am = ps.A.eval(tm);
        cs.lhs.push_back(I / h + 0.5 * Am);
        cs.rhsm.push_back(I / h - 0.5 * Am);
        cs.fmid.push_back(ps.f.eval(tm).col(0));
    }
    return cs;
}

Grid oracle_grid(const ProblemSpec& ps, int nodes_override) {
    const int nodes = nodes_override > 0 ? nodes_override : ps.num.nodes;
    return Grid::uniform(ps.a, ps.b, nodes);
}

}  // namespace

CollocationSystem assemble(const ProblemSpec& ps, int nodes_override) {
    ps.validate();
    Grid grid = oracle_grid(ps, nodes_override);
    const int N = grid.size();
    const int m = ps.m, r = ps.r;
    const SampledFunction A = ps.A.sample(grid, 0.0, ps.n - 1);
    const SampledFunction f = ps.f.sample(grid, 0.0, ps.n - 1);
    const CellScheme cs = cell_scheme(ps, grid);
    const BoundaryRows br = boundary_rows(ps, grid, A, f);

    CollocationSystem sys{grid, Eigen::MatrixXcd::Zero(m * (N - 1) + r, m * N),
                          Eigen::VectorXcd::Zero(m * (N - 1) + r)};
    for (int i = 0; i + 1 < N; ++i) {
        sys.matrix.block(m * i, m * i, m, m) = -cs.rhsm[static_cast<std::size_t>(i)];
        sys.matrix.block(m * i, m * (i + 1), m, m) = cs.lhs[static_cast<std::size_t>(i)];
        sys.rhs.segment(m * i, m) = cs.fmid[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < N; ++i)
        sys.matrix.block(m * (N - 1), m * i, r, m) = br.W[static_cast<std::size_t>(i)];
    sys.rhs.segment(m * (N - 1), r) = Eigen::VectorXcd(ps.c) - br.offset;
    return sys;
}

std::pair<int, int> dense_defect(const CollocationSystem& sys, const ProblemSpec& ps) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.matrix);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
    const double threshold = std::max(ps.num.rank_rel_tol * sigma_max, ps.num.rank_abs_floor);
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > threshold) ++rank;
    const int dim_ker = static_cast<int>(sys.matrix.cols()) - rank;
    const int dim_coker = static_cast<int>(sys.matrix.rows()) - rank;
    return {dim_ker, dim_coker};
}

OracleResult oracle_solve(const ProblemSpec& ps, int nodes_override) {
    ps.validate();
    if (ps.r != ps.m)
        throw ContractError("oracle_solve: only the square case r = m is supported");
    Grid grid = oracle_grid(ps, nodes_override);
    const int N = grid.size();
    const int m = ps.m;
    const SampledFunction A = ps.A.sample(grid, 0.0, ps.n - 1);
    const SampledFunction f = ps.f.sample(grid, 0.0, ps.n - 1);
    const CellScheme cs = cell_scheme(ps, grid);
    const BoundaryRows br = boundary_rows(ps, grid, A, f);

    // Discrete transfer chain: y_i = Yhat_i y_0 + yhat_i.
    std::vector<Eigen::MatrixXcd> Yhat(static_cast<std::size_t>(N));
    std::vector<Eigen::VectorXcd> yhat(static_cast<std::size_t>(N));
    Yhat[0] = Eigen::MatrixXcd::Identity(m, m);
    yhat[0] = Eigen::VectorXcd::Zero(m);
    for (int i = 0; i + 1 < N; ++i) {
        const auto lu = cs.lhs[static_cast<std::size_t>(i)].partialPivLu();
        Yhat[static_cast<std::size_t>(i + 1)] =
            lu.solve(cs.rhsm[static_cast<std::size_t>(i)] * Yhat[static_cast<std::size_t>(i)]);
        yhat[static_cast<std::size_t>(i + 1)] =
            lu.solve(cs.rhsm[static_cast<std::size_t>(i)] * yhat[static_cast<std::size_t>(i)] +
                     cs.fmid[static_cast<std::size_t>(i)]);
    }

    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(m, m);
    Eigen::VectorXcd d = Eigen::VectorXcd(ps.c) - br.offset;
    for (int i = 0; i < N; ++i) {
        G += br.W[static_cast<std::size_t>(i)] * Yhat[static_cast<std::size_t>(i)];
        d -= br.W[static_cast<std::size_t>(i)] * yhat[static_cast<std::size_t>(i)];
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G);
    const auto& sigma = svd.singularValues();
    const double threshold =
        std::max(ps.num.rank_rel_tol * (sigma.size() ? sigma(0) : 0.0), ps.num.rank_abs_floor);
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > threshold) ++rank;

    OracleResult result;
    result.dim_ker = m - rank;
    result.dim_coker = m - rank;
    result.unique = (rank == m);
    if (!result.unique) return result;

    const Eigen::VectorXcd y0 = G.colPivHouseholderQr().solve(d);
    SampledFunction layer0(grid, m, 1, 0);
    for (int i = 0; i < N; ++i)
        layer0.value(0, i) =
            Yhat[static_cast<std::size_t>(i)] * y0 + yhat[static_cast<std::size_t>(i)];
    result.solution = integrator::derivative_stack(layer0, A, f, ps.n);
    return result;
}

}  // namespace charmat::oracle
