#pragma once

#include <functional>
#include <vector>

#include "bcr/mesh.hpp"
#include "bcr/types.hpp"

// Piecewise-linear finite elements for the conductivity equation
// div(sigma grad u) = 0 on the unit disk with Dirichlet data on the circle,
// plus the patch-based gradient recovery that turns the nodal solution into
// boundary data triples.

namespace bcr {

struct FemOptions {
    double patch_radius_factor = 3.0;  // gradient recovery radius, in units of h
    int min_patch_points = 10;         // grow the patch until it holds this many
    double rel_residual = 1e-10;       // acceptance threshold for the linear solve
};

class FemSolution {
  public:
    FemSolution(DiskMesh mesh, std::vector<double> nodal,
                std::function<double(double, double)> sigma, FemOptions opts);

    const DiskMesh& mesh() const { return mesh_; }
    const std::vector<double>& nodal_values() const { return nodal_; }
    double sigma_at(double x, double y) const { return sigma_(x, y); }
    double patch_radius() const { return r_patch_; }

    // Weighted quadratic least-squares fit of the nodal solution over the
    // vertices within the patch radius of (x, y); returns the fitted gradient
    // at (x, y). Throws if no usable patch can be assembled.
    Vec2 gradient_at(double x, double y) const;

  private:
    DiskMesh mesh_;
    std::vector<double> nodal_;
    std::function<double(double, double)> sigma_;
    FemOptions opts_;
    double r_patch_;
    // uniform spatial hash over [-1, 1]^2 for patch queries
    int grid_dim_;
    double cell_;
    std::vector<std::vector<int>> cells_;

    void build_grid();
    void gather(double x, double y, double radius, std::vector<int>& out) const;
};

// Assemble and solve the Dirichlet problem. sigma is evaluated at the
// quadrature points of every triangle and must be strictly positive there;
// dirichlet is a function of the boundary angle.
FemSolution solve_conductivity(DiskMesh mesh,
                               std::function<double(double, double)> sigma,
                               std::function<double(double)> dirichlet,
                               FemOptions opts = {});

// Boundary data triple at angle theta on the unit circle, for interior power
// exponent q: A = |tangential derivative|, N = sigma * (normal derivative),
// H = sigma * |grad u|^q.
MeasurementTriple boundary_triple(const FemSolution& sol, double theta, double q);

}  // namespace bcr
