#pragma once

#include <string_view>
#include <utility>

#include "bcr/expr.hpp"

namespace bcr {

// A scalar coefficient field over the disk: either a plain constant or an
// expression in x1, x2. Conductivities, exponent fields, and phantoms are all
// ScalarFields.
class ScalarField {
  public:
    ScalarField() : expr_(Expr::constant(0.0)) {}
    ScalarField(double c) : expr_(Expr::constant(c)) {}
    explicit ScalarField(Expr e) : expr_(std::move(e)) {}

    static ScalarField parse(std::string_view src) {
        return ScalarField(Expr::parse(src));
    }

    double operator()(double x1, double x2) const { return expr_.eval(x1, x2); }

    bool is_constant() const { return expr_.is_constant(); }
    const Expr& expr() const { return expr_; }

  private:
    Expr expr_;
};

// An expression with its first-order partials precomputed, for fields whose
// gradient is needed repeatedly (oracle solutions, boundary data).
struct DifferentiableField {
    Expr f;
    Expr fx1;
    Expr fx2;

    static DifferentiableField from(Expr e) {
        DifferentiableField d;
        d.fx1 = e.derivative("x1");
        d.fx2 = e.derivative("x2");
        d.f = std::move(e);
        return d;
    }

    double value(double x1, double x2) const { return f.eval(x1, x2); }
    double dx1(double x1, double x2) const { return fx1.eval(x1, x2); }
    double dx2(double x1, double x2) const { return fx2.eval(x1, x2); }
};

}  // namespace bcr
