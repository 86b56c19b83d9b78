// AVX2 variants of the batch kernels. Compiled only on x86-64 builds, with
// -mavx2 and -ffp-contract=off. The elementwise kernels replicate the scalar
// reference operation for operation (multiply, subtract, square root, divide,
// blend) so their results are bit-identical; the equivalence tests assert
// that. The reductions use vector accumulators and agree with the reference
// to rounding only.

#include <cmath>
#include <cstddef>
#include <vector>

#include <immintrin.h>

#include "bcr/detail/candidate_math.hpp"
#include "bcr/kernels.hpp"

namespace bcr::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d v) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_andnot_pd(sign, v);
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    lo = _mm_add_sd(lo, shuf);
    return _mm_cvtsd_f64(lo);
}

}  // namespace

void cdii_sigma_avx2(std::span<const double> A, std::span<const double> N,
                     std::span<const double> H, std::span<double> sigma) {
    const std::size_t m = A.size();
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d a = _mm256_loadu_pd(&A[i]);
        const __m256d n = _mm256_loadu_pd(&N[i]);
        const __m256d h = _mm256_loadu_pd(&H[i]);
        const __m256d rad =
            _mm256_sub_pd(_mm256_mul_pd(h, h), _mm256_mul_pd(n, n));
        const __m256d pos = _mm256_cmp_pd(rad, zero, _CMP_GT_OQ);
        const __m256d s = _mm256_sqrt_pd(_mm256_and_pd(rad, pos));
        _mm256_storeu_pd(&sigma[i], _mm256_div_pd(s, a));
    }
    for (; i < m; ++i)
        sigma[i] = bcr::detail::cdii_sigma_value(A[i], N[i], H[i]);
}

void aet_candidates_avx2(std::span<const double> A, std::span<const double> N,
                         std::span<const double> H, std::span<double> sigma_plus,
                         std::span<double> sigma_minus, std::span<double> n_plus,
                         std::span<double> n_minus, std::span<double> n_gap) {
    const std::size_t m = A.size();
    const __m256d zero = _mm256_setzero_pd();
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d four = _mm256_set1_pd(4.0);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d a = _mm256_loadu_pd(&A[i]);
        const __m256d n = _mm256_loadu_pd(&N[i]);
        const __m256d h = _mm256_loadu_pd(&H[i]);
        const __m256d aa = _mm256_mul_pd(a, a);
        const __m256d nn = _mm256_mul_pd(n, n);
        const __m256d disc = _mm256_sub_pd(
            _mm256_mul_pd(h, h),
            _mm256_mul_pd(_mm256_mul_pd(four, aa), nn));
        const __m256d split = _mm256_cmp_pd(disc, zero, _CMP_GT_OQ);

        // collapsed branch: both candidates sit at the peak
        const __m256d sig0 = _mm256_div_pd(_mm256_mul_pd(two, nn), h);
        const __m256d n0 = _mm256_div_pd(h, _mm256_mul_pd(two, n));

        // split branch
        const __m256d s = _mm256_sqrt_pd(_mm256_and_pd(disc, split));
        const __m256d hp = _mm256_add_pd(h, s);
        const __m256d sp1 = _mm256_div_pd(_mm256_mul_pd(two, nn), hp);
        const __m256d sm1 = _mm256_div_pd(hp, _mm256_mul_pd(two, aa));
        const __m256d np1 = _mm256_div_pd(hp, _mm256_mul_pd(two, n));
        const __m256d nm1 =
            _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(two, aa), n), hp);

        __m256d sp = _mm256_blendv_pd(sig0, sp1, split);
        __m256d sm = _mm256_blendv_pd(sig0, sm1, split);
        __m256d np = _mm256_blendv_pd(n0, np1, split);
        __m256d nm = _mm256_blendv_pd(n0, nm1, split);

        // repair 1-ulp ordering inversions exactly like the scalar reference
        const __m256d swap =
            _mm256_cmp_pd(abs_pd(nm), abs_pd(np), _CMP_GT_OQ);
        const __m256d sp2 = _mm256_blendv_pd(sp, sm, swap);
        const __m256d sm2 = _mm256_blendv_pd(sm, sp, swap);
        const __m256d np2 = _mm256_blendv_pd(np, nm, swap);
        const __m256d nm2 = _mm256_blendv_pd(nm, np, swap);
        const __m256d clamp = _mm256_cmp_pd(sp2, sm2, _CMP_GT_OQ);
        const __m256d sm3 = _mm256_blendv_pd(sm2, sp2, clamp);

        _mm256_storeu_pd(&sigma_plus[i], sp2);
        _mm256_storeu_pd(&sigma_minus[i], sm3);
        _mm256_storeu_pd(&n_plus[i], np2);
        _mm256_storeu_pd(&n_minus[i], nm2);
        _mm256_storeu_pd(&n_gap[i], _mm256_sub_pd(abs_pd(np2), abs_pd(nm2)));
    }
    for (; i < m; ++i) {
        const auto pr = bcr::detail::aet_pair_value(A[i], N[i], H[i]);
        sigma_plus[i] = pr.sigma_plus;
        sigma_minus[i] = pr.sigma_minus;
        n_plus[i] = pr.n_plus;
        n_minus[i] = pr.n_minus;
        n_gap[i] = std::fabs(pr.n_plus) - std::fabs(pr.n_minus);
    }
}

void smooth_circular_avx2(std::span<const double> x, std::span<const double> kernel,
                          std::span<double> out) {
    const std::size_t m = x.size();
    const std::size_t radius = kernel.size() / 2;
    // Unroll the circle into a padded buffer so the inner loop is a plain
    // sliding dot product. Accumulation order over k matches the scalar
    // reference, so lanes come out bit-identical.
    std::vector<double> ext(m + 2 * radius);
    for (std::size_t k = 0; k < radius; ++k)
        ext[k] = x[(m * radius + k - radius) % m];
    for (std::size_t k = 0; k < m; ++k) ext[radius + k] = x[k];
    for (std::size_t k = 0; k < radius; ++k)
        ext[radius + m + k] = x[k % m];
    const std::size_t klen = kernel.size();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < klen; ++k) {
            const __m256d w = _mm256_set1_pd(kernel[k]);
            const __m256d v = _mm256_loadu_pd(&ext[i + k]);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(w, v));
        }
        _mm256_storeu_pd(&out[i], acc);
    }
    for (; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < klen; ++k) acc += kernel[k] * ext[i + k];
        out[i] = acc;
    }
}

double sum_squares_avx2(std::span<const double> x) {
    const std::size_t m = x.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d v = _mm256_loadu_pd(&x[i]);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double total = hsum_pd(acc);
    for (; i < m; ++i) total += x[i] * x[i];
    return total;
}

double sum_squared_diff_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t m = a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d d =
            _mm256_sub_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i]));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double total = hsum_pd(acc);
    for (; i < m; ++i) {
        const double d = a[i] - b[i];
        total += d * d;
    }
    return total;
}

}  // namespace bcr::kernels::detail
