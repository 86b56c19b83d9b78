// Backend registry and dispatch for the batch kernels.

#include "bcr/kernels.hpp"

#include <cassert>
#include <stdexcept>

namespace bcr::kernels {

namespace detail {

void cdii_sigma_scalar(std::span<const double>, std::span<const double>,
                       std::span<const double>, std::span<double>);
void aet_candidates_scalar(std::span<const double>, std::span<const double>,
                           std::span<const double>, std::span<double>,
                           std::span<double>, std::span<double>,
                           std::span<double>, std::span<double>);
void smooth_circular_scalar(std::span<const double>, std::span<const double>,
                            std::span<double>);
double sum_squares_scalar(std::span<const double>);
double sum_squared_diff_scalar(std::span<const double>, std::span<const double>);

#ifdef BCR_BUILD_AVX2
void cdii_sigma_avx2(std::span<const double>, std::span<const double>,
                     std::span<const double>, std::span<double>);
void aet_candidates_avx2(std::span<const double>, std::span<const double>,
                         std::span<const double>, std::span<double>,
                         std::span<double>, std::span<double>,
                         std::span<double>, std::span<double>);
void smooth_circular_avx2(std::span<const double>, std::span<const double>,
                          std::span<double>);
double sum_squares_avx2(std::span<const double>);
double sum_squared_diff_avx2(std::span<const double>, std::span<const double>);
#endif

}  // namespace detail

namespace {

bool avx2_usable() {
#ifdef BCR_BUILD_AVX2
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend& backend_slot() {
    static Backend b = avx2_usable() ? Backend::avx2 : Backend::scalar;
    return b;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

bool backend_supported(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && avx2_usable());
}

Backend active_backend() { return backend_slot(); }

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw std::invalid_argument(std::string("kernel backend not supported here: ") +
                                    backend_name(b));
    backend_slot() = b;
}

void cdii_sigma(std::span<const double> A, std::span<const double> N,
                std::span<const double> H, std::span<double> sigma) {
    assert(A.size() == N.size() && A.size() == H.size() && A.size() == sigma.size());
#ifdef BCR_BUILD_AVX2
    if (backend_slot() == Backend::avx2)
        return detail::cdii_sigma_avx2(A, N, H, sigma);
#endif
    detail::cdii_sigma_scalar(A, N, H, sigma);
}

void aet_candidates(std::span<const double> A, std::span<const double> N,
                    std::span<const double> H, std::span<double> sigma_plus,
                    std::span<double> sigma_minus, std::span<double> n_plus,
                    std::span<double> n_minus, std::span<double> n_gap) {
    assert(A.size() == N.size() && A.size() == H.size());
    assert(A.size() == sigma_plus.size() && A.size() == sigma_minus.size());
    assert(A.size() == n_plus.size() && A.size() == n_minus.size());
    assert(A.size() == n_gap.size());
#ifdef BCR_BUILD_AVX2
    if (backend_slot() == Backend::avx2)
        return detail::aet_candidates_avx2(A, N, H, sigma_plus, sigma_minus,
                                           n_plus, n_minus, n_gap);
#endif
    detail::aet_candidates_scalar(A, N, H, sigma_plus, sigma_minus, n_plus,
                                  n_minus, n_gap);
}

void smooth_circular(std::span<const double> x, std::span<const double> kernel,
                     std::span<double> out) {
    assert(x.size() == out.size());
    assert(kernel.size() % 2 == 1);
#ifdef BCR_BUILD_AVX2
    if (backend_slot() == Backend::avx2)
        return detail::smooth_circular_avx2(x, kernel, out);
#endif
    detail::smooth_circular_scalar(x, kernel, out);
}

double sum_squares(std::span<const double> x) {
#ifdef BCR_BUILD_AVX2
    if (backend_slot() == Backend::avx2) return detail::sum_squares_avx2(x);
#endif
    return detail::sum_squares_scalar(x);
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
#ifdef BCR_BUILD_AVX2
    if (backend_slot() == Backend::avx2) return detail::sum_squared_diff_avx2(a, b);
#endif
    return detail::sum_squared_diff_scalar(a, b);
}

}  // namespace bcr::kernels
