#include "bcr/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace bcr {

namespace {

struct TriGeometry {
    double area;
    // gradients of the three barycentric basis functions
    double gx[3], gy[3];
};

TriGeometry triangle_geometry(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    TriGeometry g;
    g.area = 0.5 * d;
    g.gx[0] = (b.y - c.y) / d;
    g.gy[0] = (c.x - b.x) / d;
    g.gx[1] = (c.y - a.y) / d;
    g.gy[1] = (a.x - c.x) / d;
    g.gx[2] = (a.y - b.y) / d;
    g.gy[2] = (b.x - a.x) / d;
    return g;
}

}  // namespace

FemSolution::FemSolution(DiskMesh mesh, std::vector<double> nodal,
                         std::function<double(double, double)> sigma, FemOptions opts)
    : mesh_(std::move(mesh)),
      nodal_(std::move(nodal)),
      sigma_(std::move(sigma)),
      opts_(opts),
      r_patch_(opts.patch_radius_factor * mesh_.h) {
    if (nodal_.size() != mesh_.vertex_count())
        throw std::invalid_argument("FemSolution: nodal size does not match mesh");
    build_grid();
}

void FemSolution::build_grid() {
    cell_ = std::max(r_patch_, 1e-3);
    grid_dim_ = std::max(1, static_cast<int>(std::ceil(2.0 / cell_)));
    cells_.assign(static_cast<std::size_t>(grid_dim_) * grid_dim_, {});
    for (std::size_t v = 0; v < mesh_.vertex_count(); ++v) {
        const Vec2& p = mesh_.vertices[v];
        int cx = static_cast<int>((p.x + 1.0) / cell_);
        int cy = static_cast<int>((p.y + 1.0) / cell_);
        cx = std::clamp(cx, 0, grid_dim_ - 1);
        cy = std::clamp(cy, 0, grid_dim_ - 1);
        cells_[static_cast<std::size_t>(cy) * grid_dim_ + cx].push_back(
            static_cast<int>(v));
    }
}

void FemSolution::gather(double x, double y, double radius, std::vector<int>& out) const {
    out.clear();
    const int reach = static_cast<int>(std::ceil(radius / cell_));
    int cx = static_cast<int>((x + 1.0) / cell_);
    int cy = static_cast<int>((y + 1.0) / cell_);
    cx = std::clamp(cx, 0, grid_dim_ - 1);
    cy = std::clamp(cy, 0, grid_dim_ - 1);
    const double r2 = radius * radius;
    for (int gy = std::max(0, cy - reach); gy <= std::min(grid_dim_ - 1, cy + reach); ++gy)
        for (int gx = std::max(0, cx - reach); gx <= std::min(grid_dim_ - 1, cx + reach); ++gx)
            for (int v : cells_[static_cast<std::size_t>(gy) * grid_dim_ + gx]) {
                const Vec2& p = mesh_.vertices[static_cast<std::size_t>(v)];
                const double dx = p.x - x, dy = p.y - y;
                if (dx * dx + dy * dy <= r2) out.push_back(v);
            }
}

Vec2 FemSolution::gradient_at(double x, double y) const {
    std::vector<int> patch;
    double radius = r_patch_;
    for (int attempt = 0; attempt < 6; ++attempt) {
        gather(x, y, radius, patch);
        if (static_cast<int>(patch.size()) >= opts_.min_patch_points) break;
        radius *= 1.5;
    }
    if (static_cast<int>(patch.size()) < 6)
        throw std::runtime_error("gradient_at: patch has too few vertices");

    // weighted quadratic fit in coordinates scaled by the patch radius
    const int m = static_cast<int>(patch.size());
    Eigen::MatrixXd M(m, 6);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        const Vec2& p = mesh_.vertices[static_cast<std::size_t>(patch[i])];
        const double xi = (p.x - x) / radius;
        const double eta = (p.y - y) / radius;
        const double d2 = xi * xi + eta * eta;
        const double w = d2 < 1.0 ? (1.0 - d2) * (1.0 - d2) : 0.0;
        const double sw = std::sqrt(w) + 1e-12;
        M(i, 0) = sw;
        M(i, 1) = sw * xi;
        M(i, 2) = sw * eta;
        M(i, 3) = sw * xi * xi;
        M(i, 4) = sw * xi * eta;
        M(i, 5) = sw * eta * eta;
        rhs(i) = sw * nodal_[static_cast<std::size_t>(patch[i])];
    }
    Eigen::VectorXd coef = M.colPivHouseholderQr().solve(rhs);
    return {coef(1) / radius, coef(2) / radius};
}

FemSolution solve_conductivity(DiskMesh mesh, std::function<double(double, double)> sigma,
                               std::function<double(double)> dirichlet, FemOptions opts) {
    const std::size_t nv = mesh.vertex_count();
    if (nv == 0) throw std::invalid_argument("solve_conductivity: empty mesh");

    // -1 for boundary vertices, otherwise the index among interior unknowns
    std::vector<int> interior_index(nv, 0);
    for (int b : mesh.boundary_vertices) interior_index[static_cast<std::size_t>(b)] = -1;
    int n_int = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (interior_index[v] >= 0) interior_index[v] = n_int++;

    std::vector<double> full(nv, 0.0);
    for (std::size_t i = 0; i < mesh.boundary_vertices.size(); ++i)
        full[static_cast<std::size_t>(mesh.boundary_vertices[i])] =
            dirichlet(mesh.boundary_thetas[i]);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(9 * mesh.triangle_count());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_int);

    for (const auto& t : mesh.triangles) {
        const Vec2& a = mesh.vertices[static_cast<std::size_t>(t[0])];
        const Vec2& b = mesh.vertices[static_cast<std::size_t>(t[1])];
        const Vec2& c = mesh.vertices[static_cast<std::size_t>(t[2])];
        const TriGeometry g = triangle_geometry(a, b, c);
        if (!(g.area > 0.0))
            throw std::runtime_error("solve_conductivity: degenerate or flipped triangle");

        // midpoint quadrature for the conductivity coefficient
        const Vec2 mids[3] = {{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)},
                              {0.5 * (b.x + c.x), 0.5 * (b.y + c.y)},
                              {0.5 * (c.x + a.x), 0.5 * (c.y + a.y)}};
        double sig = 0.0;
        for (const Vec2& mp : mids) {
            const double s = sigma(mp.x, mp.y);
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::domain_error(
                    "solve_conductivity: conductivity must be strictly positive "
                    "on the disk");
            sig += s;
        }
        sig /= 3.0;

        for (int i = 0; i < 3; ++i) {
            const int vi = t[static_cast<std::size_t>(i)];
            const int ii = interior_index[static_cast<std::size_t>(vi)];
            if (ii < 0) continue;
            for (int j = 0; j < 3; ++j) {
                const int vj = t[static_cast<std::size_t>(j)];
                const double k =
                    sig * g.area * (g.gx[i] * g.gx[j] + g.gy[i] * g.gy[j]);
                const int jj = interior_index[static_cast<std::size_t>(vj)];
                if (jj >= 0)
                    trips.emplace_back(ii, jj, k);
                else
                    rhs(ii) -= k * full[static_cast<std::size_t>(vj)];
            }
        }
    }

    Eigen::SparseMatrix<double> K(n_int, n_int);
    K.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(K);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_conductivity: factorization failed");
    Eigen::VectorXd u = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("solve_conductivity: back substitution failed");

    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        const double rel = (K * u - rhs).norm() / rhs_norm;
        if (!(rel <= opts.rel_residual))
            throw std::runtime_error("solve_conductivity: linear solve residual " +
                                     std::to_string(rel) + " exceeds tolerance");
    }

    for (std::size_t v = 0; v < nv; ++v)
        if (interior_index[v] >= 0) full[v] = u(interior_index[v]);

    return FemSolution(std::move(mesh), std::move(full), std::move(sigma), opts);
}

MeasurementTriple boundary_triple(const FemSolution& sol, double theta, double q) {
    if (!(q >= 0.0) || !std::isfinite(q))
        throw std::invalid_argument("boundary_triple: q must be >= 0");
    const double x = std::cos(theta);
    const double y = std::sin(theta);
    const Vec2 grad = sol.gradient_at(x, y);
    const double sig = sol.sigma_at(x, y);
    const double tangential = -y * grad.x + x * grad.y;
    const double normal = x * grad.x + y * grad.y;
    MeasurementTriple m;
    m.A = std::fabs(tangential);
    m.N = sig * normal;
    m.H = sig * std::pow(grad.x * grad.x + grad.y * grad.y, q / 2.0);
    return m;
}

}  // namespace bcr
