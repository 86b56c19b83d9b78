#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcr {

// One boundary point's measured data: tangential gradient magnitude A,
// signed normal flux N, and interior density H. A and H are magnitudes and
// never negative; N carries the sign of the normal derivative.
struct MeasurementTriple {
    double A = 0.0;
    double N = 0.0;
    double H = 0.0;

    // Magnitude of the triple, used for scale-relative zero tests.
    double scale() const { return std::max({A, std::fabs(N), H}); }

    bool a_zero(double tol) const { return A <= tol * scale(); }
    bool n_zero(double tol) const { return std::fabs(N) <= tol * scale(); }
    bool h_zero(double tol) const { return H <= tol * scale() || scale() == 0.0; }
};

enum class Regime { greater, critical, less };

// Exponent pair (p, q) at one boundary point. p is the forward-model power,
// q the interior-data power. Valid range: p > 1, q >= 0.
struct ExponentPair {
    double p;
    double q;

    ExponentPair(double p_, double q_) : p(p_), q(q_) {
        if (!(p > 1.0) || !std::isfinite(p))
            throw std::invalid_argument("ExponentPair: p must satisfy 1 < p < inf");
        if (!(q >= 0.0) || !std::isfinite(q))
            throw std::invalid_argument("ExponentPair: q must satisfy 0 <= q < inf");
    }

    double diff() const { return p - q; }

    Regime regime(double tol) const {
        const double d = diff() - 1.0;
        if (std::fabs(d) <= tol) return Regime::critical;
        return d > 0.0 ? Regime::greater : Regime::less;
    }
};

struct Candidate {
    double sigma = 0.0;
    double n = 0.0;
};

// Outcome of pointwise recovery at one boundary point: nothing, a unique
// (sigma, n) pair, or two candidate pairs. For doubles the "plus" pair is the
// one with the larger |n| (hence the smaller sigma); the ordering
// sigma_plus <= sigma_minus, |n_minus| <= |n_plus| is enforced exactly.
class CandidateSet {
  public:
    enum class Kind { nothing, unique, double_pair };

    static CandidateSet nothing() { return CandidateSet{}; }

    static CandidateSet unique(double sigma, double n) {
        CandidateSet c;
        c.kind_ = Kind::unique;
        c.plus_ = {sigma, n};
        c.minus_ = c.plus_;
        return c;
    }

    static CandidateSet double_pair(Candidate a, Candidate b) {
        CandidateSet c;
        c.kind_ = Kind::double_pair;
        if (std::fabs(b.n) > std::fabs(a.n)) std::swap(a, b);
        c.plus_ = a;
        c.minus_ = b;
        // larger |n| pairs with the smaller sigma; clamp the 1-ulp stragglers
        if (c.plus_.sigma > c.minus_.sigma) c.minus_.sigma = c.plus_.sigma;
        return c;
    }

    Kind kind() const { return kind_; }
    bool empty() const { return kind_ == Kind::nothing; }
    bool is_unique() const { return kind_ == Kind::unique; }
    bool is_double() const { return kind_ == Kind::double_pair; }

    // Valid for unique sets only.
    const Candidate& value() const { return plus_; }
    // Valid for double sets: plus has the larger |n|.
    const Candidate& plus() const { return plus_; }
    const Candidate& minus() const { return minus_; }

    // true if some member matches (sigma, n) within rel_tol
    bool contains(double sigma, double n, double rel_tol) const {
        if (kind_ == Kind::nothing) return false;
        auto matches = [&](const Candidate& c) {
            const double es = std::fabs(c.sigma - sigma) /
                              std::max(std::fabs(sigma), 1e-300);
            const double en = std::fabs(c.n - n) / std::max(std::fabs(n), 1.0);
            return es <= rel_tol && en <= rel_tol;
        };
        if (matches(plus_)) return true;
        return kind_ == Kind::double_pair && matches(minus_);
    }

  private:
    Kind kind_ = Kind::nothing;
    Candidate plus_{};
    Candidate minus_{};
};

}  // namespace bcr
