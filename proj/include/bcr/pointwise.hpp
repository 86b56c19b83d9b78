#pragma once

#include <array>

#include "bcr/types.hpp"

// Pointwise recovery of (sigma, n) from one boundary data triple (A, N, H).
// Everything reduces to the profile function
//
//     g(n) = (A^2 + n^2)^((d - 2)/2) * n,      d = p - q,
//
// whose roots against the target |N|/H are the admissible normal derivatives:
// for d > 1 the profile is strictly increasing (unique root), for d = 1 it is
// bounded (no stable inversion), and for d < 1 it rises to a single peak at
// n* = A / sqrt(1 - d) and decays, so a target below the peak has two roots
// and recovery yields two candidates.

namespace bcr {

double g_eval(double n, double A, double diff);

// derivative of g in n: (A^2 + n^2)^((diff - 4)/2) * (A^2 + (diff - 1) n^2)
double g_deriv(double n, double A, double diff);

// peak location A / sqrt(1 - diff); requires diff < 1
double g_peak_location(double A, double diff);

enum class RootStatus {
    complete,           // every real root in (0, n_max] was found
    target_above_peak,  // diff < 1 and target exceeds the peak value: no roots
    bracket_exhausted,  // roots exist beyond n_max and were not reachable
};

struct GRoots {
    int count = 0;
    std::array<double, 2> roots{};  // ascending
    RootStatus status = RootStatus::complete;
};

// Roots of g(n) = target on (0, n_max] for target > 0, A > 0. Bisection on
// the monotone segments drives |g(root) - target| <= tol * target on its own;
// a short Newton polish then tightens the residual when it can. If diff < 1
// and the target matches the peak value within tol, the peak is returned as
// a single root.
GRoots g_roots(double target, double A, double diff, double n_max, double tol);

// The recovery theorem at one point. sigma_lo only caps the root bracket via
// n_max = (H / sigma_lo)^(1/q); no candidate filtering happens here.
// tol is the scale-relative threshold for the A = 0 / N = 0 / H = 0 case
// split and the root solve.
CandidateSet recover_candidates(const MeasurementTriple& m, const ExponentPair& exps,
                                double sigma_lo, double sigma_hi, double tol = 1e-9);

// Closed form for p - q = 1 (current density data):
//   sigma = Re(sqrt(H^2 - N^2)) / A,   n = N A / sqrt(H^2 - N^2).
// A = 0 yields nothing; a clamped radicand yields the (0, 0) marker pair,
// which no admissibility interval accepts.
CandidateSet cdii_closed_form(const MeasurementTriple& m, double tol = 1e-9);

// Closed form for p = q = 2 (power density data); the double-candidate case.
CandidateSet aet_closed_form(const MeasurementTriple& m, double tol = 1e-9);

// Which discriminant the p = q = 2 closed form uses. `consistent` is the
// algebraically correct H^2 - 4 A^2 N^2. `grouped` reproduces a circulating
// mistranscription (H^2 - 4 A^2) N^2; it is dimensionally wrong and exists
// only so the two can be compared side by side.
enum class AetDiscriminant { consistent, grouped };

CandidateSet aet_closed_form(const MeasurementTriple& m, double tol,
                             AetDiscriminant form);

}  // namespace bcr
