#pragma once

#include <functional>
#include <memory>

#include "bcr/fem.hpp"
#include "bcr/fields.hpp"
#include "bcr/types.hpp"

// Boundary data sources: either an analytic oracle (a known solution field u
// and coefficient fields evaluated symbolically on the circle) or a finite
// element solve. Both expose the same sampling interface.

namespace bcr {

struct BoundarySource {
    // data triple measured at a boundary angle
    std::function<MeasurementTriple(double)> measure;
    // ground truth on the circle, when the source knows it (may be empty)
    std::function<double(double)> sigma_true;
    std::function<double(double)> n_true;
    // offset added to the uniform sampling grid; FEM sources use an
    // irrational fraction of the grid step so samples never coincide with
    // mesh vertices
    double angular_offset = 0.0;
};

// Exact data triple for a known solution u of the weighted p(x)-Laplacian
// model: A = |tangential grad|, N = sigma |grad u|^(p-2) (normal derivative),
// H = sigma |grad u|^q, all evaluated analytically at angle theta.
MeasurementTriple field_oracle(const DifferentiableField& u, const ScalarField& sigma,
                               const ScalarField& p, const ScalarField& q, double theta);

BoundarySource make_oracle_source(const DifferentiableField& u, const ScalarField& sigma,
                                  const ScalarField& p, const ScalarField& q);

// FEM-backed source for the p = 2 model with interior exponent q. The golden
// ratio fraction of the sample step is the conventional offset; callers pick
// it when they build the sample grid.
BoundarySource make_fem_source(std::shared_ptr<const FemSolution> sol,
                               const ScalarField& sigma, double q,
                               double angular_offset);

}  // namespace bcr
