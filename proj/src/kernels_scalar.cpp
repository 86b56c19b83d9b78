// Scalar reference implementations of the batch kernels. This translation
// unit is compiled with -ffp-contract=off so the elementwise kernels are the
// bit-exact reference the AVX2 variants are tested against.

#include <cassert>
#include <cmath>

#include "bcr/detail/candidate_math.hpp"
#include "bcr/kernels.hpp"

namespace bcr::kernels::detail {

void cdii_sigma_scalar(std::span<const double> A, std::span<const double> N,
                       std::span<const double> H, std::span<double> sigma) {
    const std::size_t m = A.size();
    for (std::size_t i = 0; i < m; ++i)
        sigma[i] = bcr::detail::cdii_sigma_value(A[i], N[i], H[i]);
}

void aet_candidates_scalar(std::span<const double> A, std::span<const double> N,
                           std::span<const double> H, std::span<double> sigma_plus,
                           std::span<double> sigma_minus, std::span<double> n_plus,
                           std::span<double> n_minus, std::span<double> n_gap) {
    const std::size_t m = A.size();
    for (std::size_t i = 0; i < m; ++i) {
        const auto pr = bcr::detail::aet_pair_value(A[i], N[i], H[i]);
        sigma_plus[i] = pr.sigma_plus;
        sigma_minus[i] = pr.sigma_minus;
        n_plus[i] = pr.n_plus;
        n_minus[i] = pr.n_minus;
        n_gap[i] = std::fabs(pr.n_plus) - std::fabs(pr.n_minus);
    }
}

void smooth_circular_scalar(std::span<const double> x, std::span<const double> kernel,
                            std::span<double> out) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t radius = static_cast<std::ptrdiff_t>(kernel.size()) / 2;
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
            std::ptrdiff_t j = (i + k) % m;
            if (j < 0) j += m;
            acc += kernel[static_cast<std::size_t>(k + radius)] *
                   x[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

double sum_squares_scalar(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double sum_squared_diff_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace bcr::kernels::detail
