// End-to-end acceptance checks for the boundary reconstruction toolkit.
// Each criterion prints exactly one PASS/FAIL line with its measured numbers
// and pinned tolerances; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcr/cli.hpp"
#include "bcr/config.hpp"
#include "bcr/fem.hpp"
#include "bcr/kernels.hpp"
#include "bcr/mesh.hpp"
#include "bcr/oracle.hpp"
#include "bcr/pointwise.hpp"
#include "bcr/reconstruct.hpp"
#include "bcr/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace bcr;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& note) {
    std::printf("%s  %d %s: %s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                note.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

MeasurementTriple forward_triple(double sigma, double n, double A,
                                 const ExponentPair& e) {
    const double m2 = A * A + n * n;
    return {A, sigma * std::pow(m2, (e.p - 2.0) / 2.0) * n,
            sigma * std::pow(m2, e.q / 2.0)};
}

// the same error measure CandidateSet::contains applies
double tuple_error(const Candidate& c, double sigma, double n) {
    const double es = std::fabs(c.sigma - sigma) / std::max(std::fabs(sigma), 1e-300);
    const double en = std::fabs(c.n - n) / std::max(std::fabs(n), 1.0);
    return std::max(es, en);
}

double best_error(const CandidateSet& c, double sigma, double n) {
    if (c.empty()) return std::numeric_limits<double>::infinity();
    if (c.is_unique()) return tuple_error(c.value(), sigma, n);
    return std::min(tuple_error(c.plus(), sigma, n),
                    tuple_error(c.minus(), sigma, n));
}

struct OrderingTally {
    long doubles = 0;
    long violations = 0;
    void feed(const CandidateSet& c) {
        if (!c.is_double()) return;
        ++doubles;
        if (!(c.plus().sigma <= c.minus().sigma) ||
            !(std::fabs(c.minus().n) <= std::fabs(c.plus().n)))
            ++violations;
    }
};

OrderingTally ordering;

// ---------------------------------------------------------------- criterion 1
void criterion_round_trip() {
    const double tol = 1e-8;
    const double budget_s = 5.0;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> us(0.1, 10.0);
    std::uniform_real_distribution<double> un(-5.0, 5.0);
    std::uniform_real_distribution<double> uA(0.0, 5.0);
    std::uniform_real_distribution<double> up(1.1, 4.0);
    std::uniform_real_distribution<double> uq(0.5, 3.0);

    const auto t0 = clock_type::now();
    long tested = 0, misses = 0;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double sigma = us(rng), n = un(rng), A = uA(rng);
        const ExponentPair e(up(rng), uq(rng));
        const MeasurementTriple m = forward_triple(sigma, n, A, e);
        if (m.h_zero(1e-9)) continue;                       // nothing measurable
        if (A == 0.0 && std::fabs(e.p - e.q - 1.0) < 1e-9)  // critical exponent gap
            continue;
        const CandidateSet c = recover_candidates(m, e, 0.05, 20.0, 1e-11);
        ordering.feed(c);
        ++tested;
        const double err = best_error(c, sigma, n);
        worst = std::max(worst, err);
        if (!(err <= tol)) ++misses;
    }
    const double dt = seconds_since(t0);
    report(1, "pointwise round trip", misses == 0 && dt < budget_s,
           fmt("%ld/%ld recoverable tuples within %.0e (worst %.2e), %.2f s "
               "(budget %.0f s)",
               tested - misses, tested, tol, worst, dt, budget_s));
}

// ---------------------------------------------------------------- criterion 2
void criterion_closed_forms() {
    const double tol_general = 1e-10;
    const double tol_dual = 1e-12;
    std::mt19937 rng(512);
    std::uniform_real_distribution<double> us(0.2, 5.0);
    std::uniform_real_distribution<double> un(-3.0, 3.0);
    std::uniform_real_distribution<double> uA(0.01, 3.0);
    const ExponentPair cdii(2.0, 1.0);
    const ExponentPair aet(2.0, 2.0);

    long checked = 0, fallbacks = 0;
    double worst_general = 0.0, worst_dual = 0.0;
    bool consistent = true;
    for (int i = 0; i < 10000; ++i) {
        const double sigma = us(rng), n = un(rng), A = uA(rng);
        {
            const MeasurementTriple m = forward_triple(sigma, n, A, cdii);
            const CandidateSet closed = cdii_closed_form(m, 1e-12);
            const CandidateSet general = recover_candidates(m, cdii, 0.01, 100.0, 1e-13);
            ordering.feed(closed);
            ordering.feed(general);
            if (!closed.is_unique() || !general.is_unique()) {
                consistent = false;
                continue;
            }
            worst_general =
                std::max(worst_general, tuple_error(general.value(),
                                                    closed.value().sigma,
                                                    closed.value().n));
            ++checked;
        }
        {
            const MeasurementTriple m = forward_triple(sigma, n, A, aet);
            const CandidateSet closed = aet_closed_form(m, 1e-12);
            const CandidateSet general = recover_candidates(m, aet, 0.01, 1e6, 1e-13);
            ordering.feed(closed);
            ordering.feed(general);
            if (closed.is_double() && general.is_double()) {
                worst_general = std::max(
                    worst_general,
                    std::max(tuple_error(general.plus(), closed.plus().sigma,
                                         closed.plus().n),
                             tuple_error(general.minus(), closed.minus().sigma,
                                         closed.minus().n)));
                ++checked;
            } else {
                // near-coincident pairs may classify differently on the two
                // paths; both still have to carry the true state
                ++fallbacks;
                if (!closed.contains(sigma, n, 1e-6) ||
                    !general.contains(sigma, n, 1e-6))
                    consistent = false;
            }
        }
    }

    // dual algebraic expressions for the power-density pair, evaluated where
    // the radicand keeps both forms well conditioned (s/H bounded below 1)
    std::mt19937 rng2(31);
    std::uniform_real_distribution<double> w(0.01, 2.0);
    std::uniform_real_distribution<double> wn(-2.0, 2.0);
    for (int i = 0; i < 10000; ++i) {
        const double A = w(rng2);
        const double N = wn(rng2);
        const double H = 2.0 * std::fabs(A * N) * (1.0 + 0.5 * w(rng2));
        const CandidateSet c = aet_closed_form({A, N, H}, 1e-12);
        ordering.feed(c);
        if (!c.is_double()) continue;
        const double s = std::sqrt(H * H - 4.0 * A * A * N * N);
        const double plus_from_n = N / c.plus().n;
        const double plus_direct = 2.0 * N * N / (H + s);
        const double minus_from_n = N / c.minus().n;
        const double minus_direct = 2.0 * N * N / (H - s);
        worst_dual = std::max(
            worst_dual,
            std::max(std::fabs(plus_from_n - plus_direct) / plus_direct,
                     std::fabs(minus_from_n - minus_direct) / minus_direct));
    }

    report(2, "closed-form equivalence",
           consistent && worst_general <= tol_general && worst_dual <= tol_dual,
           fmt("general-solver gap %.2e (tol %.0e) on %ld triples, %ld "
               "near-coincident fallbacks, dual-expression gap %.2e (tol %.0e)",
               worst_general, tol_general, checked, fallbacks, worst_dual,
               tol_dual));
}

// ---------------------------------------------------------------- criterion 3
void criterion_ordering() {
    report(3, "candidate ordering",
           ordering.violations == 0 && ordering.doubles > 1000,
           fmt("%ld double candidates, %ld ordering violations (exact check)",
               ordering.doubles, ordering.violations));
}

// ---------------------------------------------------------------- criterion 4
void criterion_profile_shape() {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> uA(0.01, 5.0);
    std::uniform_real_distribution<double> ud(-1.9, 3.5);
    const int grid = 10000;
    long bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const double A = uA(rng);
        const double diff = ud(rng);
        const bool unimodal = diff < 1.0;
        const double peak = unimodal ? g_peak_location(A, diff) : 0.0;
        const double hi = unimodal ? 3.0 * peak : 10.0 * A + 10.0;
        const double step = hi / grid;
        double prev = g_eval(step, A, diff);
        int transitions = 0, sign = 0, flip_index = -1;
        for (int k = 2; k <= grid; ++k) {
            const double cur = g_eval(k * step, A, diff);
            const double d = cur - prev;
            prev = cur;
            if (d == 0.0) continue;
            const int s = d > 0.0 ? 1 : -1;
            if (sign != 0 && s != sign) {
                ++transitions;
                flip_index = k;
            }
            sign = s;
        }
        bool ok;
        if (unimodal) {
            ok = transitions == 1 && flip_index > 0 &&
                 std::fabs((flip_index - 1) * step - peak) <= step;
        } else {
            ok = transitions == 0 && sign == 1;
        }
        if (!ok) ++bad;
    }
    report(4, "profile shape",
           bad == 0,
           fmt("1000 random (A, p - q) profiles on a %d-point grid, %ld "
               "mismatches (peak pinned to one grid step)",
               grid, bad));
}

// ---------------------------------------------------------------- criterion 5
void criterion_forward_convergence() {
    const double budget_s = 60.0;
    const auto t0 = clock_type::now();
    auto n_error = [](double h) {
        DiskMesh mesh = build_disk_mesh(h);
        const FemSolution sol = solve_conductivity(
            std::move(mesh), [](double x, double) { return std::exp(-x); },
            [](double theta) { return std::exp(std::cos(theta)); });
        const int M = 256;
        const double off = cli::golden_offset(M);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < M; ++k) {
            const double theta = 2.0 * M_PI * k / M + off;
            const MeasurementTriple t = boundary_triple(sol, theta, 2.0);
            const double exact = std::cos(theta);
            num += (t.N - exact) * (t.N - exact);
            den += exact * exact;
        }
        return std::sqrt(num / den);
    };
    const double coarse = n_error(0.04);
    const double fine = n_error(0.02);
    const double dt = seconds_since(t0);
    const double ratio = coarse / fine;
    report(5, "forward solver convergence",
           ratio >= 1.5 && fine <= 0.01 && dt < budget_s,
           fmt("flux error %.3e at h=0.04 vs %.3e at h=0.02, ratio %.2f "
               "(need >= 1.5), fine error <= 1%%: %s, %.1f s (budget %.0f s)",
               coarse, fine, ratio, fine <= 0.01 ? "yes" : "no", dt, budget_s));
}

// ---------------------------------------------------------------- criterion 6
void criterion_false_candidate_sides() {
    const int M = 100;
    const double sigma_lo = 0.5;  // half the (constant) true value
    const double sigma_hi = 2.0;  // twice the true value
    auto candidates_for = [&](const char* expr) {
        const SampleSet s = sample_boundary(
            make_oracle_source(DifferentiableField::from(Expr::parse(expr)),
                               ScalarField(1.0), ScalarField(2.0), ScalarField(2.0)),
            M);
        std::vector<double> A(M), N(M), H(M), sp(M), sm(M), np(M), nm(M), gap(M);
        for (int j = 0; j < M; ++j) {
            A[j] = s.triples[j].A;
            N[j] = s.triples[j].N;
            H[j] = s.triples[j].H;
        }
        kernels::aet_candidates(A, N, H, sp, sm, np, nm, gap);
        return std::pair(sp, sm);
    };

    // normal-flux zeros: the spurious low candidate must sit below sigma_lo
    const auto [sp2, sm2] = candidates_for("x2");
    double worst_low = 0.0;
    for (int center : {0, 50})
        for (int d = -2; d <= 2; ++d)
            worst_low = std::max(worst_low, sp2[(center + d + M) % M]);

    // tangentially flat points: the spurious high candidate must clear sigma_hi
    const auto [sp1, sm1] = candidates_for("x1");
    double worst_high = std::numeric_limits<double>::infinity();
    for (int center : {0, 50})
        for (int d = -2; d <= 2; ++d)
            worst_high = std::min(worst_high, sm1[(center + d + M) % M]);

    report(6, "false-candidate separation",
           worst_low < sigma_lo && worst_high > sigma_hi,
           fmt("spurious branch <= %.3e near flux zeros (bound %.1f), >= %.3e "
               "near flat points (bound %.1f), 5 samples per point",
               worst_low, sigma_lo, worst_high, sigma_hi));
}

// ---------------------------------------------------------------- criterion 7
void criterion_figure_pipeline() {
    const double budget_s = 120.0;
    const char* names[3] = {"fig1", "fig2", "fig3"};
    const double noiseless_tol[3] = {0.05, 0.05, 0.15};
    const char* stage_files[6] = {"before_double.csv", "before_population.csv",
                                  "before_interpolation.csv",
                                  "after_interpolation.csv", "after_smoothing.csv",
                                  "after_smoothing_comparison.csv"};
    bool all_ok = true;
    std::string note;
    for (int f = 0; f < 3; ++f) {
        std::ostringstream sink;
        ExperimentConfig cfg = preset_config(names[f]);
        cfg.out_dir = std::string("acceptance_out/") + names[f];
        fs::remove_all(cfg.out_dir);
        const auto t0 = clock_type::now();
        cli::run_replicate(names[f], cfg, sink);
        const double dt = seconds_since(t0);

        bool files_ok = fs::exists(cfg.out_dir + "/samples.csv") &&
                        fs::exists(cfg.out_dir + "/result.csv") &&
                        fs::exists(cfg.out_dir + "/metrics.json");
        for (const char* s : stage_files)
            files_ok = files_ok && fs::exists(cfg.out_dir + "/" + s);

        const ReconstructionResult r =
            cli::read_result_csv(cfg.out_dir + "/result.csv");
        bool terminal = true;
        for (PointLabel l : r.labels)
            if (l == PointLabel::double_undecided) terminal = false;

        ExperimentConfig quiet = preset_config(names[f]);
        quiet.noise.angular_level = 0.0;
        quiet.noise.neumann_level = 0.0;
        quiet.noise.interior_level = 0.0;
        quiet.out_dir = std::string("acceptance_out/") + names[f] + "_noiseless";
        fs::remove_all(quiet.out_dir);
        cli::run_replicate(names[f], quiet, sink);
        std::ifstream mj(quiet.out_dir + "/metrics.json");
        nlohmann::json j;
        mj >> j;
        const double smoothed = j.at("relative_l2_smoothed").get<double>();

        const bool ok = dt < budget_s && files_ok && terminal &&
                        smoothed <= noiseless_tol[f];
        all_ok = all_ok && ok;
        note += fmt("%s%s %.1f s, stages %s, labels %s, noiseless %.4f "
                    "(tol %.2f)",
                    f ? "; " : "", names[f], dt, files_ok ? "ok" : "MISSING",
                    terminal ? "terminal" : "UNDECIDED", smoothed,
                    noiseless_tol[f]);
    }
    report(7, "figure pipeline replication", all_ok, note);
}

// ---------------------------------------------------------------- criterion 8
void criterion_determinism() {
    const char* cli_path = std::getenv("BCR_CLI");
    if (!cli_path || !fs::exists(cli_path)) {
        report(8, "byte-identical reruns", false,
               "BCR_CLI does not point at the command line binary");
        return;
    }
    const std::string out_a = "acceptance_out/rerun_a";
    const std::string out_b = "acceptance_out/rerun_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    auto run = [&](const std::string& out) {
        const std::string cmd = std::string("\"") + cli_path +
                                "\" replicate fig2 --out " + out + " >/dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    if (!run(out_a) || !run(out_b)) {
        report(8, "byte-identical reruns", false, "replicate subprocess failed");
        return;
    }
    const char* files[9] = {"samples.csv",
                            "result.csv",
                            "metrics.json",
                            "before_double.csv",
                            "before_population.csv",
                            "before_interpolation.csv",
                            "after_interpolation.csv",
                            "after_smoothing.csv",
                            "after_smoothing_comparison.csv"};
    auto slurp = [](const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    int mismatches = 0;
    for (const char* f : files) {
        const std::string a = slurp(out_a + "/" + f);
        const std::string b = slurp(out_b + "/" + f);
        if (a.empty() || a != b) ++mismatches;
    }
    report(8, "byte-identical reruns", mismatches == 0,
           fmt("9 output files compared across two subprocess runs, %d "
               "mismatches",
               mismatches));
}

}  // namespace

int main() {
    std::printf("acceptance checks, pinned tolerances\n");
    try {
        criterion_round_trip();
        criterion_closed_forms();
        criterion_ordering();
        criterion_profile_shape();
        criterion_forward_convergence();
        criterion_false_candidate_sides();
        criterion_figure_pipeline();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL  aborted by exception: %s\n", e.what());
        return 99;
    }
    std::printf("%s\n", failures == 0 ? "all criteria satisfied"
                                      : "some criteria failed");
    return failures;
}
