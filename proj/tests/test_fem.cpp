#include <cmath>

#include "bcr/fem.hpp"
#include "bcr/mesh.hpp"
#include "doctest.h"

using namespace bcr;

TEST_CASE("linear solutions are reproduced exactly") {
    // u = x1 lies in the P1 space; with constant sigma the discrete solution
    // is the nodal interpolant up to solver tolerance
    DiskMesh mesh = build_disk_mesh(0.2);
    const FemSolution sol = solve_conductivity(
        std::move(mesh), [](double, double) { return 1.0; },
        [](double theta) { return std::cos(theta); });
    const DiskMesh& m = sol.mesh();
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        CHECK(sol.nodal_values()[v] ==
              doctest::Approx(m.vertices[v].x).epsilon(1e-9));
    // gradient recovery reproduces the constant gradient (1, 0)
    for (double theta : {0.0, 0.9, 2.2, 4.0, 5.9}) {
        const Vec2 g = sol.gradient_at(std::cos(theta), std::sin(theta));
        CHECK(g.x == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(g.y == doctest::Approx(0.0).epsilon(1e-7));
    }
}

TEST_CASE("manufactured solution: sigma = exp(-x1), u = exp(x1)") {
    // div(sigma grad u) = div((1, 0)) = 0, so u solves the equation exactly
    DiskMesh mesh = build_disk_mesh(0.05);
    const FemSolution sol = solve_conductivity(
        std::move(mesh), [](double x, double) { return std::exp(-x); },
        [](double theta) { return std::exp(std::cos(theta)); });
    double max_err = 0.0;
    const DiskMesh& m = sol.mesh();
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        max_err = std::max(max_err, std::fabs(sol.nodal_values()[v] -
                                              std::exp(m.vertices[v].x)));
    CHECK(max_err < 2e-3);  // O(h^2) interior error at h = 0.05

    // boundary triples: at theta the exact data is A = |sin theta| e^cos,
    // N = cos theta (sigma grad u = (1,0)), H = sigma |grad u|^q
    for (double theta : {0.0, 0.7, 1.9, 3.3, 5.1}) {
        const MeasurementTriple t = boundary_triple(sol, theta, 2.0);
        const double c = std::cos(theta);
        CHECK(t.N == doctest::Approx(c).epsilon(5e-3));
        CHECK(t.A ==
              doctest::Approx(std::fabs(std::sin(theta)) * std::exp(c))
                  .epsilon(5e-3));
        CHECK(t.H == doctest::Approx(std::exp(c)).epsilon(5e-3));
    }
}

TEST_CASE("boundary triple worked example at theta = 0") {
    DiskMesh mesh = build_disk_mesh(0.05);
    const FemSolution sol = solve_conductivity(
        std::move(mesh), [](double x, double) { return std::exp(-x); },
        [](double theta) { return std::exp(std::cos(theta)); });
    const MeasurementTriple t = boundary_triple(sol, 0.0, 2.0);
    // the recovered gradient carries discretization error even where the
    // exact tangential component vanishes
    CHECK(t.A == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
    CHECK(t.N == doctest::Approx(1.0).epsilon(5e-3));
    CHECK(t.H == doctest::Approx(std::exp(1.0)).epsilon(5e-3));
}

TEST_CASE("maximum principle and zero total flux") {
    DiskMesh mesh = build_disk_mesh(0.08);
    const FemSolution sol = solve_conductivity(
        std::move(mesh),
        [](double x, double y) { return 1.0 + 0.5 * std::sin(3.0 * x + y); },
        [](double theta) { return std::max(0.0, std::cos(theta)); });
    double lo = 1e300, hi = -1e300;
    for (double v : sol.nodal_values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= -1e-9);
    CHECK(hi <= 1.0 + 1e-9);

    // net flux through the boundary vanishes for an interior-source-free
    // equation; trapezoid over a fine angular grid
    const int K = 720;
    double flux = 0.0;
    for (int i = 0; i < K; ++i) {
        const double theta = 2.0 * M_PI * (i + 0.5) / K;
        flux += boundary_triple(sol, theta, 2.0).N * (2.0 * M_PI / K);
    }
    CHECK(std::fabs(flux) < 2e-3);
}

TEST_CASE("coefficient must stay positive on the quadrature points") {
    DiskMesh mesh = build_disk_mesh(0.3);
    CHECK_THROWS_AS(
        solve_conductivity(
            std::move(mesh), [](double x, double) { return x; },  // negative left
            [](double theta) { return std::cos(theta); }),
        std::domain_error);
}

TEST_CASE("gradient recovery from a synthetic quadratic") {
    // feed nodal values of x^2 - y^2 + x y directly; the recovered gradient
    // must match (2x + y, -2y + x) well inside the disk
    DiskMesh mesh = build_disk_mesh(0.1);
    std::vector<double> nodal(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const double x = mesh.vertices[v].x, y = mesh.vertices[v].y;
        nodal[v] = x * x - y * y + x * y;
    }
    const FemSolution sol(std::move(mesh), std::move(nodal),
                          [](double, double) { return 1.0; }, FemOptions{});
    for (double r : {0.0, 0.4, 0.8}) {
        for (double theta : {0.3, 2.0, 4.4}) {
            const double x = r * std::cos(theta), y = r * std::sin(theta);
            const Vec2 g = sol.gradient_at(x, y);
            // quadratic basis fits a quadratic exactly
            CHECK(g.x == doctest::Approx(2.0 * x + y).epsilon(1e-8));
            CHECK(g.y == doctest::Approx(-2.0 * y + x).epsilon(1e-8));
        }
    }
}
