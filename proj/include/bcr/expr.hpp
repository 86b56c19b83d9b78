#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

// A minimal expression language for phantoms, boundary data, and exponent
// fields: numeric literals, pi, the variables x1 x2 theta, the operators
// + - * / ^ with the usual precedence, and the functions exp, cos, sin,
// max(a, b). Expressions evaluate to double and differentiate symbolically;
// the derivative of max picks the branch value-by-value (ties resolve to the
// branch derivative of smaller magnitude, so max(0, x1) has derivative 0 at
// the kink).

namespace bcr {

struct expr_error : std::runtime_error {
    std::size_t position;  // 1-based column in the source text
    expr_error(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg), position(pos) {}
};

namespace detail {
struct ExprNode;
}

class Expr {
  public:
    Expr();  // the constant 0

    static Expr parse(std::string_view src);
    static Expr constant(double v);

    double eval(double x1, double x2, double theta = 0.0) const;

    // var is one of "x1", "x2", "theta"
    Expr derivative(std::string_view var) const;

    bool depends_on(std::string_view var) const;
    bool is_constant() const;

    std::string to_string() const;

  private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> n);
    std::shared_ptr<const detail::ExprNode> root_;
};

// f restricted to the unit circle: f(cos theta, sin theta, theta).
double eval_on_circle(const Expr& f, double theta);

// d/dtheta of the restriction above (chain rule through x1, x2 plus the
// explicit theta dependence).
double circle_derivative(const Expr& f, double theta);

}  // namespace bcr
