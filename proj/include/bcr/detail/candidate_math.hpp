#pragma once

#include <cmath>

// Scalar closed-form candidate algebra shared by the pointwise API and the
// batch kernels. Kept header-only and branch-light so the scalar kernel and
// the vectorized kernels can mirror the exact same operation order.

namespace bcr::detail {

// sigma for the p-q = 1 closed form: Re(sqrt(H^2 - N^2)) / A.
// A negative radicand is clamped to zero (the real part of the principal
// square root of a negative real is zero). A == 0 lanes yield inf/nan and are
// the caller's job to mask.
inline double cdii_sigma_value(double A, double N, double H) {
    const double rad = H * H - N * N;
    const double s = rad > 0.0 ? std::sqrt(rad) : 0.0;
    return s / A;
}

struct AetPair {
    double sigma_plus;
    double sigma_minus;
    double n_plus;
    double n_minus;
};

// Candidate pair for the p = q = 2 closed form, written without the
// catastrophic cancellation of the textbook minus branch:
//   s      = sqrt(H^2 - 4 A^2 N^2)
//   sigma+ = 2 N^2 / (H + s)        n+ = (H + s) / (2 N)
//   sigma- = (H + s) / (2 A^2)      n- = 2 A^2 N / (H + s)
// When the discriminant is not positive the two candidates coincide at the
// peak value (clamped real part), so both slots carry the same pair.
inline AetPair aet_pair_value(double A, double N, double H) {
    const double disc = H * H - 4.0 * (A * A) * (N * N);
    if (!(disc > 0.0)) {
        const double sig = 2.0 * (N * N) / H;
        const double n = H / (2.0 * N);
        return {sig, sig, n, n};
    }
    const double s = std::sqrt(disc);
    const double hp = H + s;
    AetPair r;
    r.sigma_plus = 2.0 * (N * N) / hp;
    r.sigma_minus = hp / (2.0 * (A * A));
    r.n_plus = hp / (2.0 * N);
    r.n_minus = 2.0 * (A * A) * N / hp;
    // Ordering is guaranteed analytically; repair the rare 1-ulp inversion so
    // downstream exact-ordering invariants hold. Comparisons are written to
    // match the vector blend semantics (false on nan).
    if (std::fabs(r.n_minus) > std::fabs(r.n_plus)) {
        const AetPair t = r;
        r.sigma_plus = t.sigma_minus;
        r.sigma_minus = t.sigma_plus;
        r.n_plus = t.n_minus;
        r.n_minus = t.n_plus;
    }
    if (r.sigma_plus > r.sigma_minus) r.sigma_minus = r.sigma_plus;
    return r;
}

}  // namespace bcr::detail
