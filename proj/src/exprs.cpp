#include "charmat/exprs.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace charmat::exprs {

enum class Kind { Literal, VarT, VarEps, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs, Sign };

struct Expression::Node {
    Kind kind;
    double literal = 0.0;
    Func func = Func::Sin;
    NodePtr lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;

NodePtr make_literal(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Literal;
    n->literal = v;
    return n;
}

bool is_literal(const NodePtr& n, double v) {
    return n->kind == Kind::Literal && n->literal == v;
}

bool is_const(const NodePtr& n) { return n->kind == Kind::Literal; }

NodePtr make_binary(Kind kind, NodePtr a, NodePtr b);
NodePtr make_neg(NodePtr a);
NodePtr make_call(Func f, NodePtr a);

// Folding keeps trees small after differentiation; identities only, no
// rewriting that could change evaluation order of non-constant subtrees.
NodePtr make_binary(Kind kind, NodePtr a, NodePtr b) {
    switch (kind) {
        case Kind::Add:
            if (is_literal(a, 0.0)) return b;
            if (is_literal(b, 0.0)) return a;
            if (is_const(a) && is_const(b)) return make_literal(a->literal + b->literal);
            break;
        case Kind::Sub:
            if (is_literal(b, 0.0)) return a;
            if (is_literal(a, 0.0)) return make_neg(b);
            if (is_const(a) && is_const(b)) return make_literal(a->literal - b->literal);
            break;
        case Kind::Mul:
            if (is_literal(a, 0.0) || is_literal(b, 0.0)) return make_literal(0.0);
            if (is_literal(a, 1.0)) return b;
            if (is_literal(b, 1.0)) return a;
            if (is_const(a) && is_const(b)) return make_literal(a->literal * b->literal);
            break;
        case Kind::Div:
            if (is_literal(a, 0.0) && !is_literal(b, 0.0)) return make_literal(0.0);
            if (is_literal(b, 1.0)) return a;
            break;
        case Kind::Pow:
            if (is_literal(b, 1.0)) return a;
            if (is_literal(b, 0.0)) return make_literal(1.0);
            break;
        default:
            break;
    }
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a) {
    if (is_const(a)) return make_literal(-a->literal);
    if (a->kind == Kind::Neg) return a->lhs;
    auto n = std::make_shared<Node>();
    n->kind = Kind::Neg;
    n->lhs = std::move(a);
    return n;
}

NodePtr make_call(Func f, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Call;
    n->func = f;
    n->lhs = std::move(a);
    return n;
}

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
        case Func::Sign: return "sign";
    }
    return "?";
}

bool lookup_func(std::string_view name, Func& out) {
    if (name == "sin") out = Func::Sin;
    else if (name == "cos") out = Func::Cos;
    else if (name == "exp") out = Func::Exp;
    else if (name == "log") out = Func::Log;
    else if (name == "sqrt") out = Func::Sqrt;
    else if (name == "abs") out = Func::Abs;
    else if (name == "sign") out = Func::Sign;
    else return false;
    return true;
}

bool contains_var(const NodePtr& n, Kind var) {
    if (!n) return false;
    if (n->kind == var) return true;
    return contains_var(n->lhs, var) || contains_var(n->rhs, var);
}

// Integer powers by repeated multiplication: exact for negative bases and
// avoids std::pow branch-cut surprises at 0^0-adjacent corners.
Complex pow_value(const Complex& base, double expo, const NodePtr& where);

std::string node_to_string(const NodePtr& n);

std::string describe(const NodePtr& n, double t, double eps) {
    std::ostringstream os;
    os << "'" << node_to_string(n) << "' at t=" << t;
    if (eps != 0.0) os << ", eps=" << eps;
    return os.str();
}

Complex eval_node(const NodePtr& n, double t, double eps) {
    switch (n->kind) {
        case Kind::Literal: return Complex(n->literal, 0.0);
        case Kind::VarT: return Complex(t, 0.0);
        case Kind::VarEps: return Complex(eps, 0.0);
        case Kind::Add: return eval_node(n->lhs, t, eps) + eval_node(n->rhs, t, eps);
        case Kind::Sub: return eval_node(n->lhs, t, eps) - eval_node(n->rhs, t, eps);
        case Kind::Mul: return eval_node(n->lhs, t, eps) * eval_node(n->rhs, t, eps);
        case Kind::Div: {
            const Complex den = eval_node(n->rhs, t, eps);
            if (den == Complex(0.0, 0.0))
                throw EvalDomainError("division by zero in " + describe(n, t, eps));
            return eval_node(n->lhs, t, eps) / den;
        }
        case Kind::Pow: {
            const Complex base = eval_node(n->lhs, t, eps);
            return pow_value(base, n->rhs->literal, n);
        }
        case Kind::Neg: return -eval_node(n->lhs, t, eps);
        case Kind::Call: {
            const Complex v = eval_node(n->lhs, t, eps);
            switch (n->func) {
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Exp: return std::exp(v);
                case Func::Log:
                    if (v == Complex(0.0, 0.0))
                        throw EvalDomainError("log of zero in " + describe(n, t, eps));
                    return std::log(v);
                case Func::Sqrt: return std::sqrt(v);
                case Func::Abs: return Complex(std::abs(v), 0.0);
                case Func::Sign:
                    if (v == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
                    return v / std::abs(v);
            }
            return Complex(0.0, 0.0);
        }
    }
    return Complex(0.0, 0.0);
}

Complex pow_value(const Complex& base, double expo, const NodePtr& where) {
    const double rounded = std::nearbyint(expo);
    if (rounded == expo && std::abs(expo) <= 64.0) {
        int k = static_cast<int>(rounded);
        if (k < 0 && base == Complex(0.0, 0.0))
            throw EvalDomainError("zero raised to a negative power in " +
                                  describe(where, 0.0, 0.0));
        Complex acc(1.0, 0.0);
        Complex b = base;
        int e = std::abs(k);
        while (e > 0) {
            if (e & 1) acc *= b;
            b *= b;
            e >>= 1;
        }
        return k < 0 ? Complex(1.0, 0.0) / acc : acc;
    }
    if (base == Complex(0.0, 0.0)) {
        if (expo > 0.0) return Complex(0.0, 0.0);
        throw EvalDomainError("zero raised to a non-positive power in " +
                              describe(where, 0.0, 0.0));
    }
    return std::exp(Complex(expo, 0.0) * std::log(base));
}

NodePtr diff_node(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Literal:
        case Kind::VarEps: return make_literal(0.0);
        case Kind::VarT: return make_literal(1.0);
        case Kind::Add: return make_binary(Kind::Add, diff_node(n->lhs), diff_node(n->rhs));
        case Kind::Sub: return make_binary(Kind::Sub, diff_node(n->lhs), diff_node(n->rhs));
        case Kind::Mul:
            return make_binary(Kind::Add, make_binary(Kind::Mul, diff_node(n->lhs), n->rhs),
                               make_binary(Kind::Mul, n->lhs, diff_node(n->rhs)));
        case Kind::Div:
            // (u/v)' = (u'v - uv') / v^2
            return make_binary(
                Kind::Div,
                make_binary(Kind::Sub, make_binary(Kind::Mul, diff_node(n->lhs), n->rhs),
                            make_binary(Kind::Mul, n->lhs, diff_node(n->rhs))),
                make_binary(Kind::Pow, n->rhs, make_literal(2.0)));
        case Kind::Pow: {
            // Exponent is a constant: (u^c)' = c * u^(c-1) * u'
            const double c = n->rhs->literal;
            return make_binary(
                Kind::Mul, make_literal(c),
                make_binary(Kind::Mul, make_binary(Kind::Pow, n->lhs, make_literal(c - 1.0)),
                            diff_node(n->lhs)));
        }
        case Kind::Neg: return make_neg(diff_node(n->lhs));
        case Kind::Call: {
            NodePtr inner = diff_node(n->lhs);
            switch (n->func) {
                case Func::Sin:
                    return make_binary(Kind::Mul, make_call(Func::Cos, n->lhs), inner);
                case Func::Cos:
                    return make_neg(make_binary(Kind::Mul, make_call(Func::Sin, n->lhs), inner));
                case Func::Exp: return make_binary(Kind::Mul, make_call(Func::Exp, n->lhs), inner);
                case Func::Log: return make_binary(Kind::Div, inner, n->lhs);
                case Func::Sqrt:
                    return make_binary(
                        Kind::Div, inner,
                        make_binary(Kind::Mul, make_literal(2.0), make_call(Func::Sqrt, n->lhs)));
                case Func::Abs:
                    // d|u|/dt = sign(u) u' away from u = 0; we take 0 at u = 0.
                    return make_binary(Kind::Mul, make_call(Func::Sign, n->lhs), inner);
                case Func::Sign: return make_literal(0.0);
            }
            return make_literal(0.0);
        }
    }
    return make_literal(0.0);
}

NodePtr bind_eps_node(const NodePtr& n, double eps) {
    switch (n->kind) {
        case Kind::Literal: return n;
        case Kind::VarT: return n;
        case Kind::VarEps: return make_literal(eps);
        case Kind::Neg: return make_neg(bind_eps_node(n->lhs, eps));
        case Kind::Call: {
            NodePtr arg = bind_eps_node(n->lhs, eps);
            if (is_const(arg)) {
                NodePtr call = make_call(n->func, arg);
                const Complex v = eval_node(call, 0.0, 0.0);
                if (v.imag() == 0.0) return make_literal(v.real());
                return call;
            }
            return make_call(n->func, std::move(arg));
        }
        default: {
            NodePtr a = bind_eps_node(n->lhs, eps);
            NodePtr b = bind_eps_node(n->rhs, eps);
            if (n->kind == Kind::Div && is_const(a) && is_const(b) && b->literal != 0.0)
                return make_literal(a->literal / b->literal);
            if (n->kind == Kind::Pow && is_const(a)) {
                const Complex v = pow_value(Complex(a->literal, 0.0), b->literal, n);
                if (v.imag() == 0.0) return make_literal(v.real());
            }
            return make_binary(n->kind, std::move(a), std::move(b));
        }
    }
}

std::string format_literal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string node_to_string(const NodePtr& n) {
    switch (n->kind) {
        case Kind::Literal:
            if (n->literal < 0.0) return "(" + format_literal(n->literal) + ")";
            return format_literal(n->literal);
        case Kind::VarT: return "t";
        case Kind::VarEps: return "eps";
        case Kind::Add: return "(" + node_to_string(n->lhs) + "+" + node_to_string(n->rhs) + ")";
        case Kind::Sub: return "(" + node_to_string(n->lhs) + "-" + node_to_string(n->rhs) + ")";
        case Kind::Mul: return "(" + node_to_string(n->lhs) + "*" + node_to_string(n->rhs) + ")";
        case Kind::Div: return "(" + node_to_string(n->lhs) + "/" + node_to_string(n->rhs) + ")";
        case Kind::Pow: return "(" + node_to_string(n->lhs) + "^" + node_to_string(n->rhs) + ")";
        case Kind::Neg: return "(-" + node_to_string(n->lhs) + ")";
        case Kind::Call:
            return std::string(func_name(n->func)) + "(" + node_to_string(n->lhs) + ")";
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "syntax error at offset " << pos_ << ": " << msg;
        throw ParseError(os.str(), pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+')) lhs = make_binary(Kind::Add, std::move(lhs), parse_term());
            else if (consume('-')) lhs = make_binary(Kind::Sub, std::move(lhs), parse_term());
            else return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        for (;;) {
            if (consume('*')) lhs = make_binary(Kind::Mul, std::move(lhs), parse_factor());
            else if (consume('/')) lhs = make_binary(Kind::Div, std::move(lhs), parse_factor());
            else return lhs;
        }
    }

    NodePtr parse_factor() {
        NodePtr base = parse_unary();
        if (consume('^')) {
            const std::size_t expo_pos = pos_;
            NodePtr expo = parse_factor();  // right-associative
            if (contains_var(expo, Kind::VarT) || contains_var(expo, Kind::VarEps)) {
                pos_ = expo_pos;
                fail("exponent must be a constant");
            }
            const Complex v = eval_node(expo, 0.0, 0.0);
            return make_binary(Kind::Pow, std::move(base), make_literal(v.real()));
        }
        return base;
    }

    NodePtr parse_unary() {
        if (consume('-')) return make_neg(parse_unary());
        return parse_atom();
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        if (consume('(')) {
            NodePtr e = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        errno = 0;
        // text_ views a NUL-terminated string (see Expression::parse).
        const double v = std::strtod(begin, &end);
        if (end == begin || errno == ERANGE) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make_literal(v);
    }

    NodePtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '_'))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "t") {
            auto n = std::make_shared<Node>();
            n->kind = Kind::VarT;
            return n;
        }
        if (name == "eps") {
            auto n = std::make_shared<Node>();
            n->kind = Kind::VarEps;
            return n;
        }
        Func f;
        if (lookup_func(name, f)) {
            if (!consume('(')) fail("expected '(' after function name");
            NodePtr arg = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return make_call(f, std::move(arg));
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }
};

}  // namespace

Expression::Expression() : root_(make_literal(0.0)) {}

Expression Expression::parse(std::string_view text) {
    const std::string owned(text);  // guarantees NUL termination for strtod
    return Expression(Parser(owned).run());
}

Expression Expression::literal(double value) { return Expression(make_literal(value)); }

Expression Expression::var_t() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::VarT;
    return Expression(std::move(n));
}

Expression Expression::var_eps() {
    auto n = std::make_shared<Node>();
    n->kind = Kind::VarEps;
    return Expression(std::move(n));
}

Expression Expression::operator+(const Expression& rhs) const {
    return Expression(make_binary(Kind::Add, root_, rhs.root_));
}
Expression Expression::operator-(const Expression& rhs) const {
    return Expression(make_binary(Kind::Sub, root_, rhs.root_));
}
Expression Expression::operator*(const Expression& rhs) const {
    return Expression(make_binary(Kind::Mul, root_, rhs.root_));
}
Expression Expression::operator/(const Expression& rhs) const {
    return Expression(make_binary(Kind::Div, root_, rhs.root_));
}
Expression Expression::operator-() const { return Expression(make_neg(root_)); }

Expression Expression::pow(double exponent) const {
    return Expression(make_binary(Kind::Pow, root_, make_literal(exponent)));
}

Expression Expression::apply(std::string_view func, const Expression& arg) {
    Func f;
    if (!lookup_func(func, f))
        throw ContractError("Expression::apply: unknown function '" + std::string(func) + "'");
    return Expression(make_call(f, arg.root_));
}

Complex Expression::eval(double t, double eps) const { return eval_node(root_, t, eps); }

Expression Expression::derivative() const { return Expression(diff_node(root_)); }

Expression Expression::bind_eps(double eps) const {
    return Expression(bind_eps_node(root_, eps));
}

bool Expression::depends_on_t() const { return contains_var(root_, Kind::VarT); }
bool Expression::depends_on_eps() const { return contains_var(root_, Kind::VarEps); }
bool Expression::is_literal_zero() const { return is_literal(root_, 0.0); }

std::string Expression::to_string() const { return node_to_string(root_); }

MatrixExpression::MatrixExpression(int rows, int cols, std::vector<Expression> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ < 1 || cols_ < 1)
        throw ContractError("MatrixExpression: shape must be at least 1x1");
    if (entries_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_))
        throw ContractError("MatrixExpression: entry count does not match rows*cols");
}

MatrixExpression MatrixExpression::zero(int rows, int cols) {
    return MatrixExpression(rows, cols,
                            std::vector<Expression>(static_cast<std::size_t>(rows) * cols));
}

MatrixExpression MatrixExpression::constant(const Eigen::MatrixXd& values) {
    std::vector<Expression> entries;
    entries.reserve(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            entries.push_back(Expression::literal(values(i, j)));
    return MatrixExpression(static_cast<int>(values.rows()), static_cast<int>(values.cols()),
                            std::move(entries));
}

MatrixExpression MatrixExpression::parse(int rows, int cols,
                                         const std::vector<std::string>& texts) {
    if (texts.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw ContractError("MatrixExpression::parse: entry count does not match rows*cols");
    std::vector<Expression> entries;
    entries.reserve(texts.size());
    for (const auto& s : texts) entries.push_back(Expression::parse(s));
    return MatrixExpression(rows, cols, std::move(entries));
}

const Expression& MatrixExpression::entry(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * cols_ + static_cast<std::size_t>(j)];
}

Eigen::MatrixXcd MatrixExpression::eval(double t, double eps) const {
    Eigen::MatrixXcd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out(i, j) = entry(i, j).eval(t, eps);
    return out;
}

MatrixExpression MatrixExpression::derivative() const {
    std::vector<Expression> entries;
    entries.reserve(entries_.size());
    for (const auto& e : entries_) entries.push_back(e.derivative());
    return MatrixExpression(rows_, cols_, std::move(entries));
}

MatrixExpression MatrixExpression::bind_eps(double eps) const {
    std::vector<Expression> entries;
    entries.reserve(entries_.size());
    for (const auto& e : entries_) entries.push_back(e.bind_eps(eps));
    return MatrixExpression(rows_, cols_, std::move(entries));
}

bool MatrixExpression::depends_on_eps() const {
    for (const auto& e : entries_)
        if (e.depends_on_eps()) return true;
    return false;
}

funcspace::SampledFunction MatrixExpression::sample(const funcspace::Grid& grid, double eps,
                                                    int order) const {
    if (order < 0) throw ContractError("MatrixExpression::sample: order must be >= 0");
    funcspace::SampledFunction out(grid, rows_, cols_, order);
    MatrixExpression layer = *this;
    for (int k = 0; k <= order; ++k) {
        for (int i = 0; i < grid.size(); ++i) {
            const double t = grid.node(i);
            try {
                out.value(k, i) = layer.eval(t, eps);
            } catch (const EvalDomainError& err) {
                std::ostringstream os;
                os << err.what() << " (entry layer " << k << ", node " << i << ", t=" << t << ")";
                throw EvalDomainError(os.str());
            }
        }
        if (k < order) layer = layer.derivative();
    }
    return out;
}

}  // namespace charmat::exprs
