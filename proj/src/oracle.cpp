#include "bcr/oracle.hpp"

#include <cmath>

namespace bcr {

MeasurementTriple field_oracle(const DifferentiableField& u, const ScalarField& sigma,
                               const ScalarField& p, const ScalarField& q, double theta) {
    const double x = std::cos(theta);
    const double y = std::sin(theta);
    const double gx = u.dx1(x, y);
    const double gy = u.dx2(x, y);
    const double sig = sigma(x, y);
    const double pv = p(x, y);
    const double qv = q(x, y);
    const double grad2 = gx * gx + gy * gy;
    MeasurementTriple m;
    m.H = sig * std::pow(grad2, qv / 2.0);
    if (grad2 == 0.0) return m;  // flat point: A = N = 0, H = 0 unless q = 0
    const double tangential = -y * gx + x * gy;
    const double normal = x * gx + y * gy;
    m.A = std::fabs(tangential);
    m.N = sig * std::pow(grad2, (pv - 2.0) / 2.0) * normal;
    return m;
}

BoundarySource make_oracle_source(const DifferentiableField& u, const ScalarField& sigma,
                                  const ScalarField& p, const ScalarField& q) {
    BoundarySource src;
    src.measure = [u, sigma, p, q](double theta) {
        return field_oracle(u, sigma, p, q, theta);
    };
    src.sigma_true = [sigma](double theta) {
        return sigma(std::cos(theta), std::sin(theta));
    };
    src.n_true = [u](double theta) {
        const double x = std::cos(theta);
        const double y = std::sin(theta);
        return x * u.dx1(x, y) + y * u.dx2(x, y);
    };
    src.angular_offset = 0.0;
    return src;
}

BoundarySource make_fem_source(std::shared_ptr<const FemSolution> sol,
                               const ScalarField& sigma, double q,
                               double angular_offset) {
    BoundarySource src;
    src.measure = [sol, q](double theta) { return boundary_triple(*sol, theta, q); };
    src.sigma_true = [sigma](double theta) {
        return sigma(std::cos(theta), std::sin(theta));
    };
    src.n_true = [sol](double theta) {
        const double x = std::cos(theta);
        const double y = std::sin(theta);
        const Vec2 g = sol->gradient_at(x, y);
        return x * g.x + y * g.y;
    };
    src.angular_offset = angular_offset;
    return src;
}

}  // namespace bcr
