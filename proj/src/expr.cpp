#include "bcr/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

namespace bcr {

namespace detail {

enum class Op {
    constant,
    var_x1,
    var_x2,
    var_theta,
    add,
    sub,
    mul,
    div,
    pow_op,
    neg,
    exp_fn,
    cos_fn,
    sin_fn,
    log_fn,    // internal: produced by differentiation of general powers
    max_fn,
    max_deriv  // internal: branch-selected derivative of max
};

struct ExprNode {
    Op op = Op::constant;
    double value = 0.0;
    std::shared_ptr<const ExprNode> a, b, c, d;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->op = Op::constant;
    n->value = v;
    return n;
}

NodePtr make_var(Op op) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    return n;
}

bool is_const(const NodePtr& n, double v) {
    return n->op == Op::constant && n->value == v;
}

NodePtr make_node(Op op, NodePtr a = nullptr, NodePtr b = nullptr,
                  NodePtr c = nullptr, NodePtr d = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->c = std::move(c);
    n->d = std::move(d);
    return n;
}

// constructors with light constant folding, to keep derivative trees small

NodePtr make_add(NodePtr a, NodePtr b) {
    if (a->op == Op::constant && b->op == Op::constant)
        return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_node(Op::add, std::move(a), std::move(b));
}

NodePtr make_sub(NodePtr a, NodePtr b) {
    if (a->op == Op::constant && b->op == Op::constant)
        return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_node(Op::neg, std::move(b));
    return make_node(Op::sub, std::move(a), std::move(b));
}

NodePtr make_mul(NodePtr a, NodePtr b) {
    if (a->op == Op::constant && b->op == Op::constant)
        return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_node(Op::mul, std::move(a), std::move(b));
}

NodePtr make_div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    return make_node(Op::div, std::move(a), std::move(b));
}

NodePtr make_neg(NodePtr a) {
    if (a->op == Op::constant) return make_const(-a->value);
    return make_node(Op::neg, std::move(a));
}

NodePtr make_pow(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    return make_node(Op::pow_op, std::move(a), std::move(b));
}

double eval_node(const ExprNode& n, double x1, double x2, double theta) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::var_x1: return x1;
        case Op::var_x2: return x2;
        case Op::var_theta: return theta;
        case Op::add:
            return eval_node(*n.a, x1, x2, theta) + eval_node(*n.b, x1, x2, theta);
        case Op::sub:
            return eval_node(*n.a, x1, x2, theta) - eval_node(*n.b, x1, x2, theta);
        case Op::mul:
            return eval_node(*n.a, x1, x2, theta) * eval_node(*n.b, x1, x2, theta);
        case Op::div:
            return eval_node(*n.a, x1, x2, theta) / eval_node(*n.b, x1, x2, theta);
        case Op::pow_op:
            return std::pow(eval_node(*n.a, x1, x2, theta),
                            eval_node(*n.b, x1, x2, theta));
        case Op::neg: return -eval_node(*n.a, x1, x2, theta);
        case Op::exp_fn: return std::exp(eval_node(*n.a, x1, x2, theta));
        case Op::cos_fn: return std::cos(eval_node(*n.a, x1, x2, theta));
        case Op::sin_fn: return std::sin(eval_node(*n.a, x1, x2, theta));
        case Op::log_fn: return std::log(eval_node(*n.a, x1, x2, theta));
        case Op::max_fn: {
            const double va = eval_node(*n.a, x1, x2, theta);
            const double vb = eval_node(*n.b, x1, x2, theta);
            return va >= vb ? va : vb;
        }
        case Op::max_deriv: {
            const double va = eval_node(*n.a, x1, x2, theta);
            const double vb = eval_node(*n.b, x1, x2, theta);
            if (va > vb) return eval_node(*n.c, x1, x2, theta);
            if (vb > va) return eval_node(*n.d, x1, x2, theta);
            const double da = eval_node(*n.c, x1, x2, theta);
            const double db = eval_node(*n.d, x1, x2, theta);
            return std::fabs(da) <= std::fabs(db) ? da : db;
        }
    }
    return 0.0;
}

NodePtr derive(const NodePtr& n, Op var);

NodePtr derive_pow(const NodePtr& a, const NodePtr& b, Op var) {
    const NodePtr da = derive(a, var);
    const NodePtr db = derive(b, var);
    if (is_const(db, 0.0)) {
        // d/dx a^c = c * a^(c-1) * a'
        NodePtr expm1 = make_sub(b, make_const(1.0));
        return make_mul(make_mul(b, make_pow(a, std::move(expm1))), da);
    }
    if (is_const(da, 0.0)) {
        // d/dx c^b = c^b * log(c) * b'
        return make_mul(make_mul(make_pow(a, b), make_node(Op::log_fn, a)), db);
    }
    // general a^b * (b' log a + b a'/a)
    NodePtr left = make_mul(db, make_node(Op::log_fn, a));
    NodePtr right = make_div(make_mul(b, da), a);
    return make_mul(make_pow(a, b), make_add(std::move(left), std::move(right)));
}

NodePtr derive(const NodePtr& n, Op var) {
    switch (n->op) {
        case Op::constant: return make_const(0.0);
        case Op::var_x1:
        case Op::var_x2:
        case Op::var_theta: return make_const(n->op == var ? 1.0 : 0.0);
        case Op::add: return make_add(derive(n->a, var), derive(n->b, var));
        case Op::sub: return make_sub(derive(n->a, var), derive(n->b, var));
        case Op::mul:
            return make_add(make_mul(derive(n->a, var), n->b),
                            make_mul(n->a, derive(n->b, var)));
        case Op::div: {
            NodePtr num = make_sub(make_mul(derive(n->a, var), n->b),
                                   make_mul(n->a, derive(n->b, var)));
            return make_div(std::move(num), make_mul(n->b, n->b));
        }
        case Op::pow_op: return derive_pow(n->a, n->b, var);
        case Op::neg: return make_neg(derive(n->a, var));
        case Op::exp_fn: return make_mul(make_node(Op::exp_fn, n->a), derive(n->a, var));
        case Op::cos_fn:
            return make_neg(make_mul(make_node(Op::sin_fn, n->a), derive(n->a, var)));
        case Op::sin_fn:
            return make_mul(make_node(Op::cos_fn, n->a), derive(n->a, var));
        case Op::log_fn: return make_div(derive(n->a, var), n->a);
        case Op::max_fn:
            return make_node(Op::max_deriv, n->a, n->b, derive(n->a, var),
                             derive(n->b, var));
        case Op::max_deriv:
            throw std::logic_error("cannot differentiate a max selection twice");
    }
    return make_const(0.0);
}

bool node_depends(const ExprNode& n, Op var) {
    if (n.op == var) return true;
    for (const auto* child : {n.a.get(), n.b.get(), n.c.get(), n.d.get()})
        if (child && node_depends(*child, var)) return true;
    return false;
}

int precedence(Op op) {
    switch (op) {
        case Op::add:
        case Op::sub: return 1;
        case Op::mul:
        case Op::div: return 2;
        case Op::neg: return 3;
        case Op::pow_op: return 4;
        default: return 5;
    }
}

void print_node(const ExprNode& n, std::string& out, int parent_prec) {
    const int prec = precedence(n.op);
    const bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (n.op) {
        case Op::constant: {
            char buf[32];
            snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            break;
        }
        case Op::var_x1: out += "x1"; break;
        case Op::var_x2: out += "x2"; break;
        case Op::var_theta: out += "theta"; break;
        case Op::add:
            print_node(*n.a, out, prec);
            out += " + ";
            print_node(*n.b, out, prec);
            break;
        case Op::sub:
            print_node(*n.a, out, prec);
            out += " - ";
            print_node(*n.b, out, prec + 1);
            break;
        case Op::mul:
            print_node(*n.a, out, prec);
            out += "*";
            print_node(*n.b, out, prec);
            break;
        case Op::div:
            print_node(*n.a, out, prec);
            out += "/";
            print_node(*n.b, out, prec + 1);
            break;
        case Op::pow_op:
            print_node(*n.a, out, prec + 1);
            out += "^";
            print_node(*n.b, out, prec);
            break;
        case Op::neg:
            out += '-';
            print_node(*n.a, out, prec + 1);
            break;
        case Op::exp_fn:
        case Op::cos_fn:
        case Op::sin_fn:
        case Op::log_fn: {
            out += n.op == Op::exp_fn   ? "exp"
                   : n.op == Op::cos_fn ? "cos"
                   : n.op == Op::sin_fn ? "sin"
                                        : "log";
            out += '(';
            print_node(*n.a, out, 0);
            out += ')';
            break;
        }
        case Op::max_fn:
            out += "max(";
            print_node(*n.a, out, 0);
            out += ", ";
            print_node(*n.b, out, 0);
            out += ')';
            break;
        case Op::max_deriv:
            out += "max_deriv(";
            print_node(*n.a, out, 0);
            out += ", ";
            print_node(*n.b, out, 0);
            out += ", ";
            print_node(*n.c, out, 0);
            out += ", ";
            print_node(*n.d, out, 0);
            out += ')';
            break;
    }
    if (parens) out += ')';
}

// recursive-descent parser

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

  private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        throw expr_error("expression error at column " + std::to_string(pos_ + 1) +
                             ": " + msg,
                         pos_ + 1);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (consume('+'))
                e = make_add(std::move(e), parse_term());
            else if (consume('-'))
                e = make_sub(std::move(e), parse_term());
            else
                return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            if (consume('*'))
                e = make_mul(std::move(e), parse_unary());
            else if (consume('/'))
                e = make_div(std::move(e), parse_unary());
            else
                return e;
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return make_neg(parse_unary());
        if (consume('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) return make_pow(std::move(base), parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("expected a value");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr == begin) fail("malformed number");
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        return make_const(v);
    }

    NodePtr parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x1") return make_var(Op::var_x1);
        if (name == "x2") return make_var(Op::var_x2);
        if (name == "theta") return make_var(Op::var_theta);
        if (name == "pi") return make_const(M_PI);
        if (name == "exp" || name == "cos" || name == "sin") {
            if (!consume('(')) fail("expected '(' after function name");
            NodePtr arg = parse_expr();
            if (!consume(')')) fail("expected ')'");
            const Op op = name == "exp" ? Op::exp_fn
                          : name == "cos" ? Op::cos_fn
                                          : Op::sin_fn;
            return make_node(op, std::move(arg));
        }
        if (name == "max") {
            if (!consume('(')) fail("expected '(' after function name");
            NodePtr a = parse_expr();
            if (!consume(',')) fail("expected ',' in max(a, b)");
            NodePtr b = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return make_node(Op::max_fn, std::move(a), std::move(b));
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }
};

Op var_from_name(std::string_view var) {
    if (var == "x1") return Op::var_x1;
    if (var == "x2") return Op::var_x2;
    if (var == "theta") return Op::var_theta;
    throw std::invalid_argument("unknown variable: " + std::string(var));
}

}  // namespace

}  // namespace detail

Expr::Expr() : root_(detail::make_const(0.0)) {}

Expr::Expr(std::shared_ptr<const detail::ExprNode> n) : root_(std::move(n)) {}

Expr Expr::parse(std::string_view src) {
    detail::Parser p(src);
    return Expr(p.run());
}

Expr Expr::constant(double v) { return Expr(detail::make_const(v)); }

double Expr::eval(double x1, double x2, double theta) const {
    return detail::eval_node(*root_, x1, x2, theta);
}

Expr Expr::derivative(std::string_view var) const {
    return Expr(detail::derive(root_, detail::var_from_name(var)));
}

bool Expr::depends_on(std::string_view var) const {
    return detail::node_depends(*root_, detail::var_from_name(var));
}

bool Expr::is_constant() const {
    return !depends_on("x1") && !depends_on("x2") && !depends_on("theta");
}

std::string Expr::to_string() const {
    std::string out;
    detail::print_node(*root_, out, 0);
    return out;
}

double eval_on_circle(const Expr& f, double theta) {
    return f.eval(std::cos(theta), std::sin(theta), theta);
}

double circle_derivative(const Expr& f, double theta) {
    const double x1 = std::cos(theta);
    const double x2 = std::sin(theta);
    const double fx1 = f.derivative("x1").eval(x1, x2, theta);
    const double fx2 = f.derivative("x2").eval(x1, x2, theta);
    const double ft = f.derivative("theta").eval(x1, x2, theta);
    return -x2 * fx1 + x1 * fx2 + ft;
}

}  // namespace bcr
