#include "charmat/boundary.hpp"

#include <sstream>

namespace charmat::boundary {

BoundaryOperator::BoundaryOperator()
    : form_(CanonicalBoundary{{Eigen::MatrixXcd::Identity(1, 1)},
                              exprs::MatrixExpression::zero(1, 1)}) {}

BoundaryOperator::BoundaryOperator(CanonicalBoundary canonical) : form_(std::move(canonical)) {
    const auto& c = std::get<CanonicalBoundary>(form_);
    const int r = c.phi.rows(), m = c.phi.cols();
    for (const auto& alpha : c.alphas)
        if (alpha.rows() != r || alpha.cols() != m)
            throw ContractError("CanonicalBoundary: every alpha matrix must be r x m");
}

BoundaryOperator::BoundaryOperator(MultipointBoundary multipoint) : form_(std::move(multipoint)) {
    const auto& mp = std::get<MultipointBoundary>(form_);
    if (mp.groups.empty()) throw ContractError("MultipointBoundary: group list must not be empty");
    const int r = mp.rows();
    if (r != mp.m)
        throw ContractError("MultipointBoundary: only the square case r = m is supported; got r=" +
                            std::to_string(r) + ", m=" + std::to_string(mp.m));
    for (std::size_t j = 0; j < mp.groups.size(); ++j) {
        const auto& g = mp.groups[j];
        if (j >= 1 && !g.limit_point && !g.terms.empty())
            throw ContractError("MultipointBoundary: group " + std::to_string(j) +
                                " needs a limit point");
        for (const auto& term : g.terms) {
            if (static_cast<int>(term.betas.size()) != mp.n + 1)
                throw ContractError("MultipointBoundary: every term needs exactly n+1 matrices");
            for (const auto& beta : term.betas)
                if (beta.rows() != mp.m || beta.cols() != mp.m)
                    throw ContractError("MultipointBoundary: coefficient matrices must be m x m");
        }
    }
}

const CanonicalBoundary& BoundaryOperator::canonical() const {
    if (!is_canonical()) throw ContractError("BoundaryOperator: not in canonical form");
    return std::get<CanonicalBoundary>(form_);
}

const MultipointBoundary& BoundaryOperator::multipoint() const {
    if (!is_multipoint()) throw ContractError("BoundaryOperator: not in multipoint form");
    return std::get<MultipointBoundary>(form_);
}

int BoundaryOperator::rows() const {
    return is_canonical() ? canonical().rows() : multipoint().rows();
}

int BoundaryOperator::cols() const {
    return is_canonical() ? canonical().cols() : multipoint().m;
}

int BoundaryOperator::order() const {
    return is_canonical() ? canonical().order() : multipoint().n;
}

void BoundaryOperator::validate(double a, double b, int m, int n, int r) const {
    if (cols() != m || rows() != r)
        throw ContractError("BoundaryOperator: shape (" + std::to_string(rows()) + " x " +
                            std::to_string(cols()) + ") does not match problem (r=" +
                            std::to_string(r) + ", m=" + std::to_string(m) + ")");
    if (order() != n)
        throw ContractError("BoundaryOperator: derivative order " + std::to_string(order()) +
                            " does not match problem order " + std::to_string(n));
    if (is_multipoint()) {
        for (const auto& g : multipoint().groups)
            for (const auto& term : g.terms)
                if (term.point < a || term.point > b) {
                    std::ostringstream os;
                    os << "BoundaryOperator: point " << term.point << " outside [" << a << ", "
                       << b << "]";
                    throw ContractError(os.str());
                }
    }
}

Eigen::MatrixXcd apply(const BoundaryOperator& op, const SampledFunction& y) {
    const int n = op.order();
    if (y.order() < n)
        throw ContractError("apply: function stores derivative layers to order " +
                            std::to_string(y.order()) + " but the operator needs order " +
                            std::to_string(n));
    if (y.rows() != op.cols())
        throw ContractError("apply: function has " + std::to_string(y.rows()) +
                            " components, operator expects " + std::to_string(op.cols()));

    if (op.is_canonical()) {
        const auto& c = op.canonical();
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(c.rows(), y.cols());
        for (int k = 0; k < n; ++k) out += c.alphas[static_cast<std::size_t>(k)] * y.value(k, 0);
        const funcspace::Grid& g = y.grid();
        for (int i = 0; i < g.size(); ++i)
            out += g.quad_weight(i) * (c.phi.eval(g.node(i)) * y.value(n, i));
        return out;
    }

    const auto& mp = op.multipoint();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(mp.m, y.cols());
    for (const auto& group : mp.groups)
        for (const auto& term : group.terms)
            for (int l = 0; l <= n; ++l) {
                const auto& beta = term.betas[static_cast<std::size_t>(l)];
                if (beta.isZero(0.0)) continue;
                out += beta * y.eval_layer_at(l, term.point);
            }
    return out;
}

BoundaryOperator two_point(const Eigen::MatrixXcd& B_a, const Eigen::MatrixXcd& B_b, double a,
                           double b, int n) {
    if (B_a.rows() != B_a.cols() || B_b.rows() != B_b.cols() || B_a.rows() != B_b.rows())
        throw ContractError("two_point: matrices must be square and of equal size");
    const int m = static_cast<int>(B_a.rows());
    MultipointBoundary mp;
    mp.m = m;
    mp.n = n;
    mp.groups.resize(static_cast<std::size_t>(m) + 1);

    auto make_term = [&](double point, const Eigen::MatrixXcd& B) {
        PointTerm term;
        term.point = point;
        term.betas.assign(static_cast<std::size_t>(n) + 1, Eigen::MatrixXcd::Zero(m, m));
        term.betas[0] = B;
        return term;
    };
    mp.groups[1].limit_point = a;
    mp.groups[1].terms.push_back(make_term(a, B_a));
    if (m >= 2) {
        mp.groups[2].limit_point = b;
        mp.groups[2].terms.push_back(make_term(b, B_b));
    } else {
        mp.groups[0].terms.push_back(make_term(b, B_b));
    }
    return BoundaryOperator(std::move(mp));
}

double continuity_bound(const BoundaryOperator& op, const funcspace::Grid& grid) {
    double bound = 0.0;
    if (op.is_canonical()) {
        const auto& c = op.canonical();
        for (const auto& alpha : c.alphas) bound += alpha.jacobiSvd().singularValues()(0);
        for (int i = 0; i < grid.size(); ++i)
            bound += grid.quad_weight(i) *
                     c.phi.eval(grid.node(i)).jacobiSvd().singularValues()(0);
        return bound;
    }
    for (const auto& group : op.multipoint().groups)
        for (const auto& term : group.terms)
            for (const auto& beta : term.betas) bound += beta.jacobiSvd().singularValues()(0);
    return bound;
}

}  // namespace charmat::boundary
