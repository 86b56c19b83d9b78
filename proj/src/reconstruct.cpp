#include "bcr/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <utility>

#include "bcr/errors.hpp"
#include "bcr/kernels.hpp"

namespace bcr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_bounds(const Bounds& b) {
    if (!(b.sigma_lo > 0.0) || !(b.sigma_hi > b.sigma_lo))
        throw std::invalid_argument("Bounds: need 0 < sigma_lo < sigma_hi");
    if (!(b.eq_tol > 0.0)) throw std::invalid_argument("Bounds: eq_tol must be positive");
    if (b.eps_stop && !(*b.eps_stop > 0.0))
        throw std::invalid_argument("Bounds: eps_stop must be positive when given");
}

ReconstructionResult blank_result(const SampleSet& s) {
    ReconstructionResult r;
    const std::size_t m = s.size();
    r.thetas = s.thetas;
    r.sigma_est.assign(m, kNaN);
    r.labels.assign(m, PointLabel::double_undecided);
    r.stopping.assign(m, 0);
    r.candidates.assign(m, SampleCandidates{});
    r.branch.assign(m, 0);
    return r;
}

bool in_bounds(double v, const Bounds& b) {
    return v >= b.sigma_lo && v <= b.sigma_hi;
}

bool is_undecided(const ReconstructionResult& r, std::size_t i) {
    return r.labels[i] == PointLabel::double_undecided;
}

// Strict local minimum of the cyclic sequence dn, where plateaus count as a
// single point: the comparison runs against the nearest distinct value on
// each side, so every member of a locally minimal plateau is flagged.
bool plateau_local_min(const std::vector<double>& dn, std::size_t j) {
    const std::size_t m = dn.size();
    const double v = dn[j];
    double left = v;
    for (std::size_t s = 1; s < m; ++s) {
        const double c = dn[(j + m - s) % m];
        if (c != v) {
            left = c;
            break;
        }
    }
    double right = v;
    for (std::size_t s = 1; s < m; ++s) {
        const double c = dn[(j + s) % m];
        if (c != v) {
            right = c;
            break;
        }
    }
    return left > v && right > v;
}

void finalize_class_sets(ReconstructionResult& r) {
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r.candidates[j].present) r.set_double.push_back(static_cast<int>(j));
        if (r.stopping[j]) r.set_stopping.push_back(static_cast<int>(j));
        if (is_undecided(r, j)) r.undecided_history.push_back(static_cast<int>(j));
    }
}

std::vector<double> masked_estimate(const ReconstructionResult& r,
                                    const std::function<bool(std::size_t)>& keep) {
    std::vector<double> out(r.size(), kNaN);
    for (std::size_t j = 0; j < r.size(); ++j)
        if (keep(j)) out[j] = r.sigma_est[j];
    return out;
}

}  // namespace

const char* label_name(PointLabel l) {
    switch (l) {
        case PointLabel::decided: return "decided";
        case PointLabel::double_undecided: return "undecided";
        case PointLabel::propagated: return "propagated";
        case PointLabel::interpolated: return "interpolated";
    }
    return "?";
}

ReconstructionResult algorithm1(const SampleSet& s, const Bounds& b) {
    validate_bounds(b);
    const std::size_t m = s.size();
    if (m == 0) throw std::invalid_argument("algorithm1: empty sample set");

    std::vector<double> A(m), N(m), H(m), sig(m);
    for (std::size_t j = 0; j < m; ++j) {
        A[j] = s.triples[j].A;
        N[j] = s.triples[j].N;
        H[j] = s.triples[j].H;
    }
    kernels::cdii_sigma(A, N, H, sig);

    ReconstructionResult r = blank_result(s);
    for (std::size_t j = 0; j < m; ++j) {
        if (!s.triples[j].a_zero(b.eq_tol) && in_bounds(sig[j], b)) {
            r.sigma_est[j] = sig[j];
            r.labels[j] = PointLabel::decided;
        }
    }
    finalize_class_sets(r);
    interpolate_undecided(r);
    return r;
}

ReconstructionResult classify_points(const SampleSet& s, const Bounds& b,
                                     AetDiscriminant form) {
    validate_bounds(b);
    const std::size_t m = s.size();
    if (m == 0) throw std::invalid_argument("classify_points: empty sample set");

    std::vector<double> A(m), N(m), H(m);
    for (std::size_t j = 0; j < m; ++j) {
        A[j] = s.triples[j].A;
        N[j] = s.triples[j].N;
        H[j] = s.triples[j].H;
    }
    std::vector<double> sp(m), sm(m), np(m), nm(m), gap(m);
    if (form == AetDiscriminant::consistent) {
        kernels::aet_candidates(A, N, H, sp, sm, np, nm, gap);
    } else {
        // comparison mode: the mistranscribed radicand, reproduced verbatim
        for (std::size_t j = 0; j < m; ++j) {
            const double rad = (H[j] * H[j] - 4.0 * A[j] * A[j]) * (N[j] * N[j]);
            const double sq = rad > 0.0 ? std::sqrt(rad) : 0.0;
            sp[j] = 2.0 * N[j] * N[j] / (H[j] + sq);
            sm[j] = 2.0 * N[j] * N[j] / (H[j] - sq);
            np[j] = N[j] / sp[j];
            nm[j] = N[j] / sm[j];
            gap[j] = std::fabs(np[j]) - std::fabs(nm[j]);
        }
    }

    ReconstructionResult r = blank_result(s);

    auto decide = [&](std::size_t j, double value, int branch_mask) {
        r.sigma_est[j] = value;
        r.labels[j] = PointLabel::decided;
        r.branch[j] = branch_mask;
    };

    for (std::size_t j = 0; j < m; ++j) {
        const MeasurementTriple& t = s.triples[j];
        const bool hz = t.h_zero(b.eq_tol);
        const bool az = t.a_zero(b.eq_tol);
        const bool nz = t.n_zero(b.eq_tol);
        if (hz) {
            // no candidate computable; also a stopping point
            r.stopping[j] = 1;
            continue;
        }
        if (!az && nz) {
            const double v = t.H / (t.A * t.A);
            if (in_bounds(v, b)) {
                decide(j, v, 0);
                continue;
            }
        } else if (az && !nz) {
            const double v = t.N * t.N / t.H;
            if (in_bounds(v, b)) {
                decide(j, v, 0);
                continue;
            }
        }
        // double-candidate branch
        r.candidates[j] = {true, sp[j], sm[j], np[j], nm[j], gap[j]};
        const bool in_p = in_bounds(sp[j], b);
        const bool in_m = in_bounds(sm[j], b);
        const bool equal =
            std::fabs(sp[j] - sm[j]) <=
            b.eq_tol * std::max(std::fabs(sp[j]), std::fabs(sm[j]));
        if (equal && in_p)
            decide(j, sp[j], 3);
        else if (in_p && !in_m)
            decide(j, sp[j], 1);
        else if (!in_p && in_m)
            decide(j, sm[j], 2);
        // else: stays undecided
    }

    // stopping points of the second kind: local minima of the candidate gap
    double eps = 0.0;
    if (b.eps_stop) {
        eps = *b.eps_stop;
    } else {
        std::vector<double> mags;
        mags.reserve(m);
        for (std::size_t j = 0; j < m; ++j)
            if (r.candidates[j].present && std::isfinite(r.candidates[j].n_plus))
                mags.push_back(std::fabs(r.candidates[j].n_plus));
        if (!mags.empty()) {
            const std::size_t mid = mags.size() / 2;
            std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
            eps = 0.05 * mags[mid];
        }
    }
    r.eps_stop_used = eps;

    std::vector<double> dn(m, kInf);
    for (std::size_t j = 0; j < m; ++j)
        if (r.candidates[j].present) dn[j] = r.candidates[j].n_gap;
    for (std::size_t j = 0; j < m; ++j) {
        if (!r.candidates[j].present) continue;
        if (!(std::fabs(dn[j]) < eps)) continue;
        if (plateau_local_min(dn, j)) r.stopping[j] = 1;
    }

    finalize_class_sets(r);
    return r;
}

void propagate_choices(ReconstructionResult& r, const Bounds& b) {
    validate_bounds(b);
    const std::size_t m = r.size();
    if (m == 0) return;

    auto is_anchor = [&](std::size_t i) {
        return r.stopping[i] != 0 || (r.candidates[i].present && !is_undecided(r, i));
    };
    // anchor agrees with a branch: decided or propagated with a matching mask
    auto matches = [&](std::size_t i, int bit) {
        return !is_undecided(r, i) && (r.branch[i] & bit) != 0;
    };

    std::set<std::pair<std::size_t, std::size_t>> stop_flanked;

    for (std::size_t j = 0; j < m; ++j) {
        if (!(is_undecided(r, j) && r.candidates[j].present && !r.stopping[j]))
            continue;  // seeds are (D ∩ U) \ S

        std::size_t k = m, l = m;
        for (std::size_t step = 1; step < m; ++step) {
            const std::size_t i = (j + m - step) % m;
            if (is_anchor(i)) {
                k = i;
                break;
            }
        }
        for (std::size_t step = 1; step < m; ++step) {
            const std::size_t i = (j + step) % m;
            if (is_anchor(i)) {
                l = i;
                break;
            }
        }
        if (k == m || l == m) continue;  // no anchors anywhere

        const bool ku = is_undecided(r, k);
        const bool lu = is_undecided(r, l);
        int bit = 0;
        for (int candidate_bit : {2, 1}) {  // minus first, per the branch order
            const bool ok = (!ku && !lu && matches(k, candidate_bit) &&
                             matches(l, candidate_bit)) ||
                            (ku && !lu && matches(l, candidate_bit)) ||
                            (!ku && lu && matches(k, candidate_bit));
            if (ok) {
                bit = candidate_bit;
                break;
            }
        }
        if (bit == 0) {
            if (ku && lu) stop_flanked.insert({k, l});
            continue;
        }
        for (std::size_t i = (k + 1) % m; i != l; i = (i + 1) % m) {
            if (!(is_undecided(r, i) && r.candidates[i].present)) continue;
            r.sigma_est[i] =
                bit == 1 ? r.candidates[i].sigma_plus : r.candidates[i].sigma_minus;
            r.labels[i] = PointLabel::propagated;
            r.branch[i] = bit;
        }
    }

    // propagation follows the anchors blindly; push any out-of-bounds values
    // back to the undecided pool so interpolation replaces them
    for (std::size_t i = 0; i < m; ++i) {
        if (r.labels[i] == PointLabel::propagated && !in_bounds(r.sigma_est[i], b)) {
            r.labels[i] = PointLabel::double_undecided;
            r.sigma_est[i] = kNaN;
            r.branch[i] = 0;
        }
    }
    r.stop_flanked_interpolation_runs = static_cast<int>(stop_flanked.size());
}

void interpolate_undecided(ReconstructionResult& r) {
    const std::size_t m = r.size();
    std::vector<std::size_t> anchors;
    for (std::size_t j = 0; j < m; ++j)
        if (r.labels[j] == PointLabel::decided || r.labels[j] == PointLabel::propagated)
            anchors.push_back(j);
    if (anchors.empty())
        throw std::runtime_error("no anchor points for interpolation");
    if (anchors.size() == m) return;

    const double two_pi = 2.0 * M_PI;
    for (std::size_t g = 0; g < anchors.size(); ++g) {
        const std::size_t a = anchors[g];
        const std::size_t b = anchors[(g + 1) % anchors.size()];
        const double ta = r.thetas[a];
        double tb = r.thetas[b];
        if (tb <= ta) tb += two_pi;  // wrapped gap (or single anchor)
        for (std::size_t i = (a + 1) % m; i != b; i = (i + 1) % m) {
            double ti = r.thetas[i];
            if (ti < ta) ti += two_pi;
            const double t = (ti - ta) / (tb - ta);
            r.sigma_est[i] = r.sigma_est[a] + t * (r.sigma_est[b] - r.sigma_est[a]);
            r.labels[i] = PointLabel::interpolated;
            r.branch[i] = 0;
        }
    }
}

std::vector<double> gaussian_smooth(const std::vector<double>& values,
                                    double kernel_std_samples) {
    if (!(kernel_std_samples > 0.0) || values.size() < 2) return values;
    const int radius = static_cast<int>(std::ceil(4.0 * kernel_std_samples));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    const double inv2s2 = 1.0 / (2.0 * kernel_std_samples * kernel_std_samples);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-static_cast<double>(i) * i * inv2s2);
        kernel[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;
    std::vector<double> out(values.size());
    kernels::smooth_circular(values, kernel, out);
    return out;
}

ReconstructionResult algorithm2(const SampleSet& s, const Bounds& b,
                                double kernel_std_samples, StageRecorder* recorder,
                                AetDiscriminant form) {
    const double kstd = kernel_std_samples > 0.0
                            ? kernel_std_samples
                            : static_cast<double>(s.size()) / 100.0;
    ReconstructionResult r = classify_points(s, b, form);
    if (recorder) {
        recorder->capture("before_double", masked_estimate(r, [&](std::size_t j) {
                              return r.labels[j] == PointLabel::decided &&
                                     !r.candidates[j].present;
                          }));
        recorder->capture("before_population", masked_estimate(r, [&](std::size_t j) {
                              return r.labels[j] == PointLabel::decided;
                          }));
    }
    propagate_choices(r, b);
    if (recorder)
        recorder->capture("before_interpolation", masked_estimate(r, [&](std::size_t j) {
                              return !is_undecided(r, j);
                          }));
    interpolate_undecided(r);
    if (recorder) recorder->capture("after_interpolation", r.sigma_est);
    r.sigma_smoothed = gaussian_smooth(r.sigma_est, kstd);
    if (recorder) recorder->capture("after_smoothing", r.sigma_smoothed);
    return r;
}

ReconstructionResult algorithm_general(const SampleSet& s, const Bounds& b,
                                       const ScalarField& p, const ScalarField& q,
                                       double kernel_std_samples) {
    validate_bounds(b);
    const std::size_t m = s.size();
    if (m == 0) throw std::invalid_argument("algorithm_general: empty sample set");
    const double kstd = kernel_std_samples > 0.0
                            ? kernel_std_samples
                            : static_cast<double>(m) / 100.0;

    ReconstructionResult r = blank_result(s);
    for (std::size_t j = 0; j < m; ++j) {
        const double x = std::cos(s.thetas[j]);
        const double y = std::sin(s.thetas[j]);
        const ExponentPair exps(p(x, y), q(x, y));
        const CandidateSet cs = recover_candidates(s.triples[j], exps, b.sigma_lo,
                                                   b.sigma_hi, b.eq_tol);
        if (s.triples[j].h_zero(b.eq_tol)) r.stopping[j] = 1;
        if (cs.empty()) continue;
        if (cs.is_unique()) {
            if (in_bounds(cs.value().sigma, b)) {
                r.sigma_est[j] = cs.value().sigma;
                r.labels[j] = PointLabel::decided;
            }
            continue;
        }
        const Candidate cp = cs.plus();
        const Candidate cm = cs.minus();
        r.candidates[j] = {true, cp.sigma, cm.sigma, cp.n, cm.n,
                           std::fabs(cp.n) - std::fabs(cm.n)};
        const bool in_p = in_bounds(cp.sigma, b);
        const bool in_m = in_bounds(cm.sigma, b);
        const bool equal = std::fabs(cp.sigma - cm.sigma) <=
                           b.eq_tol * std::max(std::fabs(cp.sigma), std::fabs(cm.sigma));
        if (equal && in_p) {
            r.sigma_est[j] = cp.sigma;
            r.labels[j] = PointLabel::decided;
            r.branch[j] = 3;
        } else if (in_p && !in_m) {
            r.sigma_est[j] = cp.sigma;
            r.labels[j] = PointLabel::decided;
            r.branch[j] = 1;
        } else if (!in_p && in_m) {
            r.sigma_est[j] = cm.sigma;
            r.labels[j] = PointLabel::decided;
            r.branch[j] = 2;
        }
    }
    finalize_class_sets(r);
    interpolate_undecided(r);
    r.sigma_smoothed = gaussian_smooth(r.sigma_est, kstd);
    return r;
}

Metrics evaluate(const ReconstructionResult& r, const std::vector<double>& sigma_true) {
    if (r.size() != sigma_true.size())
        throw std::invalid_argument("evaluate: estimate and truth lengths differ");
    if (r.size() == 0) throw std::invalid_argument("evaluate: empty result");

    Metrics m;
    const double denom = kernels::sum_squares(sigma_true);
    if (!(denom > 0.0)) throw std::invalid_argument("evaluate: truth is identically 0");
    m.relative_l2 = std::sqrt(kernels::sum_squared_diff(r.sigma_est, sigma_true) / denom);
    if (r.sigma_smoothed.size() == r.size())
        m.relative_l2_smoothed =
            std::sqrt(kernels::sum_squared_diff(r.sigma_smoothed, sigma_true) / denom);

    int counts[3] = {0, 0, 0};
    double diff2[3] = {0.0, 0.0, 0.0};
    double true2[3] = {0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < r.size(); ++j) {
        const double t = sigma_true[j];
        const double d = r.sigma_est[j] - t;
        if (t != 0.0) m.max_relative = std::max(m.max_relative, std::fabs(d / t));
        int cls;
        switch (r.labels[j]) {
            case PointLabel::decided: cls = 0; break;
            case PointLabel::propagated: cls = 1; break;
            case PointLabel::interpolated: cls = 2; break;
            default:
                throw std::invalid_argument("evaluate: result has undecided points");
        }
        ++counts[cls];
        diff2[cls] += d * d;
        true2[cls] += t * t;
    }
    const double total = static_cast<double>(r.size());
    m.decided_fraction = counts[0] / total;
    m.propagated_fraction = counts[1] / total;
    m.interpolated_fraction = counts[2] / total;
    for (int c = 0; c < 3; ++c) {
        m.per_label[c].count = counts[c];
        m.per_label[c].relative_l2 =
            true2[c] > 0.0 ? std::sqrt(diff2[c] / true2[c]) : 0.0;
    }
    return m;
}

namespace {

void append_double(std::string& line, double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

}  // namespace

void write_result_csv(std::ostream& os, const ReconstructionResult& r) {
    os << "theta,sigma_est,sigma_est_smoothed,label,sigma_plus,sigma_minus,stopping\n";
    const bool smoothed = r.sigma_smoothed.size() == r.size();
    std::string line;
    for (std::size_t j = 0; j < r.size(); ++j) {
        line.clear();
        append_double(line, r.thetas[j]);
        line += ',';
        append_double(line, r.sigma_est[j]);
        line += ',';
        append_double(line, smoothed ? r.sigma_smoothed[j] : r.sigma_est[j]);
        line += ',';
        line += label_name(r.labels[j]);
        line += ',';
        if (r.candidates[j].present) append_double(line, r.candidates[j].sigma_plus);
        line += ',';
        if (r.candidates[j].present) append_double(line, r.candidates[j].sigma_minus);
        line += ',';
        line += r.stopping[j] ? '1' : '0';
        line += '\n';
        os << line;
    }
}

void write_result_csv(const std::string& path, const ReconstructionResult& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    write_result_csv(os, r);
    if (!os.good()) throw data_error("failed writing result: " + path);
}

}  // namespace bcr
