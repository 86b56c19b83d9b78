#pragma once

#include <cstddef>
#include <span>
#include <string>

// Batch kernels for the data-parallel inner loops: closed-form candidate
// evaluation over whole sample sets, circular Gaussian convolution, and the
// squared-error reductions. Each kernel has a scalar reference implementation
// and, on x86-64 builds, an AVX2 variant selected at runtime. The elementwise
// kernels are compiled without FP contraction so both variants produce
// bit-identical results; the reductions reassociate and agree to rounding
// error only.

namespace bcr::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

// true if this build and this CPU can run the given backend
bool backend_supported(Backend b);

// Currently selected backend. Defaults to the widest supported one.
Backend active_backend();

// Force a backend. Throws std::invalid_argument if unsupported here.
void set_backend(Backend b);

// sigma[i] = Re(sqrt(H[i]^2 - N[i]^2)) / A[i]
void cdii_sigma(std::span<const double> A, std::span<const double> N,
                std::span<const double> H, std::span<double> sigma);

// Candidate pairs and |n+| - |n-| gaps for the p = q = 2 closed form.
// Lanes where the data is degenerate (H = 0, N = 0, A = 0) produce inf/nan
// that callers classify away before use.
void aet_candidates(std::span<const double> A, std::span<const double> N,
                    std::span<const double> H, std::span<double> sigma_plus,
                    std::span<double> sigma_minus, std::span<double> n_plus,
                    std::span<double> n_minus, std::span<double> n_gap);

// Circular (periodic) correlation of x with a symmetric kernel of odd length
// 2R + 1: out[i] = sum_{k=-R..R} kernel[k+R] * x[(i+k) mod M]. The kernel is
// used as given; normalization is the caller's business.
void smooth_circular(std::span<const double> x, std::span<const double> kernel,
                     std::span<double> out);

// sum of x[i]^2
double sum_squares(std::span<const double> x);

// sum of (a[i] - b[i])^2
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

}  // namespace bcr::kernels
