#include "bcr/pointwise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bcr/detail/candidate_math.hpp"

namespace bcr {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// Bisection on a monotone segment [lo, hi] of g followed by a short Newton
// polish. `increasing` says which way g runs on the segment. The bisection
// loop owns the residual contract |g(r) - target| <= tol * target; Newton
// steps are only kept when they shrink the residual further.
double solve_on_segment(double lo, double hi, double target, double A, double diff,
                        bool increasing, double tol) {
    auto residual = [&](double n) { return g_eval(n, A, diff) - target; };
    double flo = residual(lo);
    double fhi = residual(hi);
    // callers guarantee a bracket up to roundoff; tidy the degenerate cases
    if (increasing ? flo > 0.0 : flo < 0.0) return lo;
    if (increasing ? fhi < 0.0 : fhi > 0.0) return hi;

    double mid = 0.5 * (lo + hi);
    double fmid = residual(mid);
    const double rtol = tol * target;
    for (int it = 0; it < 200 && std::fabs(fmid) > rtol; ++it) {
        const bool go_right = increasing ? (fmid < 0.0) : (fmid > 0.0);
        (go_right ? lo : hi) = mid;
        const double next = 0.5 * (lo + hi);
        if (next == lo || next == hi) break;  // interval at machine width
        mid = next;
        fmid = residual(mid);
    }
    for (int it = 0; it < 5; ++it) {
        const double slope = g_deriv(mid, A, diff);
        if (slope == 0.0 || !std::isfinite(slope)) break;
        const double step = fmid / slope;
        const double next = mid - step;
        if (!(next > lo) || !(next < hi)) break;
        const double fnext = residual(next);
        if (!(std::fabs(fnext) < std::fabs(fmid))) break;
        mid = next;
        fmid = fnext;
    }
    return mid;
}

CandidateSet candidates_from_roots(const GRoots& rs, const MeasurementTriple& m,
                                   double q, double n_sign) {
    auto make = [&](double r) -> Candidate {
        const double sigma = m.H * std::pow(m.A * m.A + r * r, -q / 2.0);
        return {sigma, std::copysign(r, n_sign)};
    };
    if (rs.count == 0) return CandidateSet::nothing();
    if (rs.count == 1) {
        const Candidate c = make(rs.roots[0]);
        return CandidateSet::unique(c.sigma, c.n);
    }
    return CandidateSet::double_pair(make(rs.roots[0]), make(rs.roots[1]));
}

}  // namespace

double g_eval(double n, double A, double diff) {
    return std::pow(A * A + n * n, (diff - 2.0) / 2.0) * n;
}

double g_deriv(double n, double A, double diff) {
    return std::pow(A * A + n * n, (diff - 4.0) / 2.0) *
           (A * A + (diff - 1.0) * n * n);
}

double g_peak_location(double A, double diff) {
    require(diff < 1.0, "g_peak_location: requires diff < 1");
    return A / std::sqrt(1.0 - diff);
}

GRoots g_roots(double target, double A, double diff, double n_max, double tol) {
    require(std::isfinite(target) && target > 0.0, "g_roots: target must be positive");
    require(std::isfinite(A) && A > 0.0, "g_roots: A must be positive");
    require(std::isfinite(diff), "g_roots: diff must be finite");
    require(std::isfinite(n_max) && n_max > 0.0, "g_roots: n_max must be positive");
    require(std::isfinite(tol) && tol > 0.0, "g_roots: tol must be positive");

    GRoots out;
    if (diff >= 1.0) {
        // strictly increasing: at most one root
        if (g_eval(n_max, A, diff) < target) {
            out.status = RootStatus::bracket_exhausted;
            return out;
        }
        out.count = 1;
        out.roots[0] = solve_on_segment(0.0, n_max, target, A, diff, true, tol);
        return out;
    }

    const double peak = g_peak_location(A, diff);
    const double gpeak = g_eval(peak, A, diff);
    if (target > gpeak * (1.0 + tol)) {
        out.status = RootStatus::target_above_peak;
        return out;
    }
    if (std::fabs(target - gpeak) <= tol * gpeak) {
        // the two roots have merged at the peak
        if (peak <= n_max) {
            out.count = 1;
            out.roots[0] = peak;
        } else {
            out.status = RootStatus::bracket_exhausted;
        }
        return out;
    }

    // target strictly below the peak: one root each side of it
    const double rise_end = std::min(peak, n_max);
    if (g_eval(rise_end, A, diff) >= target) {
        out.roots[out.count++] =
            solve_on_segment(0.0, rise_end, target, A, diff, true, tol);
    } else {
        // ascending root lies beyond n_max (possible only when peak > n_max)
        out.status = RootStatus::bracket_exhausted;
        return out;
    }
    if (peak <= n_max && g_eval(n_max, A, diff) <= target) {
        out.roots[out.count++] =
            solve_on_segment(peak, n_max, target, A, diff, false, tol);
    } else {
        out.status = RootStatus::bracket_exhausted;
    }
    return out;
}

CandidateSet recover_candidates(const MeasurementTriple& m, const ExponentPair& exps,
                                double sigma_lo, double sigma_hi, double tol) {
    require(std::isfinite(m.A) && m.A >= 0.0, "recover_candidates: A must be >= 0");
    require(std::isfinite(m.N), "recover_candidates: N must be finite");
    require(std::isfinite(m.H) && m.H >= 0.0, "recover_candidates: H must be >= 0");
    require(std::isfinite(sigma_lo) && sigma_lo > 0.0,
            "recover_candidates: sigma_lo must be positive");
    require(sigma_hi > sigma_lo, "recover_candidates: sigma_hi must exceed sigma_lo");
    require(std::isfinite(tol) && tol > 0.0, "recover_candidates: tol must be positive");

    const double diff = exps.diff();

    if (exps.q == 0.0) {
        // degenerate interior data H = sigma: sigma reads off directly and n
        // solves the one remaining monotone equation (diff = p > 1)
        if (m.h_zero(tol)) return CandidateSet::nothing();
        if (m.n_zero(tol)) return CandidateSet::unique(m.H, 0.0);
        const double target = std::fabs(m.N) / m.H;
        if (m.a_zero(tol)) {
            const double r = std::pow(target, 1.0 / (exps.p - 1.0));
            return CandidateSet::unique(m.H, std::copysign(r, m.N));
        }
        double n_max = 1.0;
        while (g_eval(n_max, m.A, diff) < target && n_max < 1e150) n_max *= 2.0;
        const GRoots rs = g_roots(target, m.A, diff, n_max, tol);
        if (rs.count == 0) return CandidateSet::nothing();
        return CandidateSet::unique(m.H, std::copysign(rs.roots[0], m.N));
    }

    if (m.h_zero(tol)) return CandidateSet::nothing();

    const bool az = m.a_zero(tol);
    const bool nz = m.n_zero(tol);

    if (nz && !az) {
        // n = 0 and sigma follows from H alone
        return CandidateSet::unique(m.H * std::pow(m.A, -exps.q), 0.0);
    }
    if (az && !nz) {
        // tangentially flat point: solvable except at the critical difference
        if (std::fabs(diff - 1.0) <= tol) return CandidateSet::nothing();
        const double absn = std::pow(std::fabs(m.N) / m.H, 1.0 / (diff - 1.0));
        const double e = (exps.p - 1.0) / (diff - 1.0);
        const double sigma = std::pow(std::fabs(m.N), 1.0 - e) * std::pow(m.H, e);
        return CandidateSet::unique(sigma, std::copysign(absn, m.N));
    }
    if (az && nz) {
        // H > 0 with a vanishing gradient is not consistent data
        return CandidateSet::nothing();
    }

    const double target = std::fabs(m.N) / m.H;
    const double n_max =
        std::min(std::pow(m.H / sigma_lo, 1.0 / exps.q), 1e150);
    const GRoots rs = g_roots(target, m.A, diff, n_max, tol);
    (void)sigma_hi;  // upper bound is an admissibility matter, not recovery's
    return candidates_from_roots(rs, m, exps.q, m.N);
}

CandidateSet cdii_closed_form(const MeasurementTriple& m, double tol) {
    if (m.a_zero(tol)) return CandidateSet::nothing();
    const double rad = m.H * m.H - m.N * m.N;
    if (!(rad > 0.0)) return CandidateSet::unique(0.0, 0.0);
    const double s = std::sqrt(rad);
    return CandidateSet::unique(s / m.A, m.N * m.A / s);
}

CandidateSet aet_closed_form(const MeasurementTriple& m, double tol) {
    return aet_closed_form(m, tol, AetDiscriminant::consistent);
}

CandidateSet aet_closed_form(const MeasurementTriple& m, double tol,
                             AetDiscriminant form) {
    if (m.h_zero(tol)) return CandidateSet::nothing();
    const bool az = m.a_zero(tol);
    const bool nz = m.n_zero(tol);
    if (nz) {
        if (az) return CandidateSet::nothing();
        return CandidateSet::unique(m.H / (m.A * m.A), 0.0);
    }
    if (az) {
        return CandidateSet::unique(m.N * m.N / m.H, m.H / m.N);
    }
    if (form == AetDiscriminant::grouped) {
        // mistranscribed grouping, for comparison runs only
        const double rad = (m.H * m.H - 4.0 * m.A * m.A) * (m.N * m.N);
        const double s = rad > 0.0 ? std::sqrt(rad) : 0.0;
        const double sp = 2.0 * m.N * m.N / (m.H + s);
        const double sm = 2.0 * m.N * m.N / (m.H - s);
        if (s == 0.0) return CandidateSet::unique(sp, m.N / sp);
        return CandidateSet::double_pair({sp, m.N / sp}, {sm, m.N / sm});
    }
    const auto pr = detail::aet_pair_value(m.A, m.N, m.H);
    if (pr.sigma_plus == pr.sigma_minus && pr.n_plus == pr.n_minus)
        return CandidateSet::unique(pr.sigma_plus, pr.n_plus);
    return CandidateSet::double_pair({pr.sigma_plus, pr.n_plus},
                                     {pr.sigma_minus, pr.n_minus});
}

}  // namespace bcr
