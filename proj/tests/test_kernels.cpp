#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include "bcr/kernels.hpp"
#include "doctest.h"

namespace k = bcr::kernels;

namespace {

bool same_bits_or_both_nan(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    std::uint64_t ua, ub;
    std::memcpy(&ua, &a, 8);
    std::memcpy(&ub, &b, 8);
    return ua == ub;
}

// data with ordinary lanes plus every degenerate combination the classifier
// has to see: H = 0, N = 0, A = 0, A = N = 0, huge and tiny magnitudes
struct TripleBatch {
    std::vector<double> A, N, H;
};

TripleBatch make_batch(std::size_t m, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> mag(0.0, 5.0);
    std::uniform_real_distribution<double> sgn(-1.0, 1.0);
    TripleBatch b;
    b.A.resize(m);
    b.N.resize(m);
    b.H.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        b.A[i] = mag(rng);
        b.N[i] = 3.0 * sgn(rng);
        b.H[i] = mag(rng) + 0.1;
        switch (i % 9) {
            case 3: b.H[i] = 0.0; break;
            case 4: b.N[i] = 0.0; break;
            case 5: b.A[i] = 0.0; break;
            case 6: b.A[i] = b.N[i] = 0.0; break;
            case 7: b.A[i] *= 1e150; b.N[i] *= 1e150; b.H[i] *= 1e150; break;
            case 8: b.A[i] *= 1e-200; b.N[i] *= 1e-200; b.H[i] *= 1e-200; break;
            default: break;
        }
    }
    return b;
}

struct BackendGuard {
    k::Backend saved = k::active_backend();
    ~BackendGuard() { k::set_backend(saved); }
};

}  // namespace

TEST_CASE("backend control") {
    BackendGuard guard;
    CHECK(k::backend_supported(k::Backend::scalar));
    k::set_backend(k::Backend::scalar);
    CHECK(k::active_backend() == k::Backend::scalar);
    CHECK(std::string(k::backend_name(k::Backend::scalar)) == "scalar");
    CHECK(std::string(k::backend_name(k::Backend::avx2)) == "avx2");
    if (!k::backend_supported(k::Backend::avx2))
        CHECK_THROWS_AS(k::set_backend(k::Backend::avx2), std::invalid_argument);
}

TEST_CASE("scalar and avx2 elementwise kernels match bit for bit") {
    if (!k::backend_supported(k::Backend::avx2)) {
        MESSAGE("avx2 unavailable here; skipping the comparison");
        return;
    }
    BackendGuard guard;
    // sizes probe every remainder lane of the 4-wide vator loop
    for (std::size_t m : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 64u, 1001u}) {
        const TripleBatch b = make_batch(m, static_cast<std::uint32_t>(m));

        std::vector<double> sig_s(m), sig_v(m);
        k::set_backend(k::Backend::scalar);
        k::cdii_sigma(b.A, b.N, b.H, sig_s);
        k::set_backend(k::Backend::avx2);
        k::cdii_sigma(b.A, b.N, b.H, sig_v);
        for (std::size_t i = 0; i < m; ++i)
            CHECK(same_bits_or_both_nan(sig_s[i], sig_v[i]));

        std::vector<double> sp_s(m), sm_s(m), np_s(m), nm_s(m), g_s(m);
        std::vector<double> sp_v(m), sm_v(m), np_v(m), nm_v(m), g_v(m);
        k::set_backend(k::Backend::scalar);
        k::aet_candidates(b.A, b.N, b.H, sp_s, sm_s, np_s, nm_s, g_s);
        k::set_backend(k::Backend::avx2);
        k::aet_candidates(b.A, b.N, b.H, sp_v, sm_v, np_v, nm_v, g_v);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(same_bits_or_both_nan(sp_s[i], sp_v[i]));
            CHECK(same_bits_or_both_nan(sm_s[i], sm_v[i]));
            CHECK(same_bits_or_both_nan(np_s[i], np_v[i]));
            CHECK(same_bits_or_both_nan(nm_s[i], nm_v[i]));
            CHECK(same_bits_or_both_nan(g_s[i], g_v[i]));
        }
    }
}

TEST_CASE("smooth_circular matches across backends, all radii") {
    if (!k::backend_supported(k::Backend::avx2)) return;
    BackendGuard guard;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (std::size_t m : {3u, 5u, 16u, 101u}) {
        for (std::size_t r : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                              std::size_t{7}, m, 2 * m + 1}) {  // radius > m wraps
            std::vector<double> x(m), kern(2 * r + 1), out_s(m), out_v(m);
            for (auto& v : x) v = u(rng);
            for (auto& v : kern) v = u(rng);
            k::set_backend(k::Backend::scalar);
            k::smooth_circular(x, kern, out_s);
            k::set_backend(k::Backend::avx2);
            k::smooth_circular(x, kern, out_v);
            for (std::size_t i = 0; i < m; ++i)
                CHECK(same_bits_or_both_nan(out_s[i], out_v[i]));
        }
    }
}

TEST_CASE("smooth_circular reference semantics") {
    BackendGuard guard;
    k::set_backend(k::Backend::scalar);
    // identity kernel
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> out(4);
    k::smooth_circular(x, std::vector<double>{1.0}, out);
    CHECK(out == x);
    // [0,0,1] shifts forward: out[i] = x[(i+1) mod m]
    k::smooth_circular(x, std::vector<double>{0.0, 0.0, 1.0}, out);
    CHECK(out == std::vector<double>{2.0, 3.0, 4.0, 1.0});
    // [1,0,0] shifts backward
    k::smooth_circular(x, std::vector<double>{1.0, 0.0, 0.0}, out);
    CHECK(out == std::vector<double>{4.0, 1.0, 2.0, 3.0});
}

TEST_CASE("reductions agree across backends to rounding error") {
    BackendGuard guard;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t m : {1u, 5u, 1000u, 100003u}) {
        std::vector<double> a(m), b(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        k::set_backend(k::Backend::scalar);
        const double ss = k::sum_squares(a);
        const double ds = k::sum_squared_diff(a, b);
        if (k::backend_supported(k::Backend::avx2)) {
            k::set_backend(k::Backend::avx2);
            CHECK(k::sum_squares(a) == doctest::Approx(ss).epsilon(1e-13));
            CHECK(k::sum_squared_diff(a, b) == doctest::Approx(ds).epsilon(1e-13));
        }
        // cross-check against a long-double reference
        long double ref = 0.0L;
        for (double v : a) ref += static_cast<long double>(v) * v;
        CHECK(ss == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    }
}

TEST_CASE("cdii kernel formula spot checks") {
    BackendGuard guard;
    k::set_backend(k::Backend::scalar);
    std::vector<double> A = {2.0, 1.0, 0.0};
    std::vector<double> N = {3.0, 5.0, 1.0};
    std::vector<double> H = {5.0, 5.0, 2.0};
    std::vector<double> sig(3);
    k::cdii_sigma(A, N, H, sig);
    CHECK(sig[0] == doctest::Approx(2.0).epsilon(1e-15));  // sqrt(25-9)/2
    CHECK(sig[1] == 0.0);                                  // clamped radicand
    CHECK((std::isnan(sig[2]) || std::isinf(sig[2])));     // A = 0 lane
}
