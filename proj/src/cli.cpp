#include "bcr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "bcr/errors.hpp"
#include "bcr/fem.hpp"
#include "json.hpp"

namespace bcr::cli {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// constant-expression value, or NaN when the field actually varies
double constant_value(const ScalarField& f) {
    if (!f.is_constant()) return std::numeric_limits<double>::quiet_NaN();
    return f(0.0, 0.0);
}

bool near(double a, double b) { return std::fabs(a - b) <= 1e-12; }

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw config_error("cannot create output directory '" + dir +
                               "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_stage_csv(const std::string& path, const std::vector<double>& thetas,
                     const std::vector<double>& values) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "theta,sigma\n";
    char buf[96];
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        snprintf(buf, sizeof buf, "%.17g,%.17g\n", thetas[j], values[j]);
        os << buf;
    }
    if (!os.good()) throw data_error("failed writing stage file: " + path);
}

void write_comparison_csv(const std::string& path, const std::vector<double>& thetas,
                          const std::vector<double>& smoothed,
                          const std::vector<double>& truth) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << "theta,sigma_est_smoothed,sigma_true\n";
    char buf[144];
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", thetas[j], smoothed[j],
                 truth[j]);
        os << buf;
    }
    if (!os.good()) throw data_error("failed writing stage file: " + path);
}

struct RangeSummary {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void take(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

void print_sample_summary(std::ostream& log, const SampleSet& s,
                          const std::string& path) {
    RangeSummary a, n, h;
    for (const auto& t : s.triples) {
        a.take(t.A);
        n.take(t.N);
        h.take(t.H);
    }
    char buf[256];
    snprintf(buf, sizeof buf,
             "wrote %s: M=%zu, A in [%.4g, %.4g], N in [%.4g, %.4g], "
             "H in [%.4g, %.4g], truth=%s\n",
             path.c_str(), s.size(), a.lo, a.hi, n.lo, n.hi, h.lo, h.hi,
             s.has_truth() ? "yes" : "no");
    log << buf;
}

void print_metrics(std::ostream& log, const Metrics& m, bool smoothed) {
    char buf[256];
    if (smoothed)
        snprintf(buf, sizeof buf,
                 "relative L2 error: %.4g, smoothed: %.4g, max relative: %.4g\n",
                 m.relative_l2, m.relative_l2_smoothed, m.max_relative);
    else
        snprintf(buf, sizeof buf, "relative L2 error: %.4g, max relative: %.4g\n",
                 m.relative_l2, m.max_relative);
    log << buf;
    snprintf(buf, sizeof buf,
             "labels: decided %.1f%%, propagated %.1f%%, interpolated %.1f%%\n",
             100.0 * m.decided_fraction, 100.0 * m.propagated_fraction,
             100.0 * m.interpolated_fraction);
    log << buf;
}

ScalarField parse_field(const std::string& src, const char* what) {
    try {
        return ScalarField::parse(src);
    } catch (const expr_error& e) {
        throw config_error(std::string(what) + ": " + e.what());
    }
}

}  // namespace

double golden_offset(int samples) {
    return 0.5 * (std::sqrt(5.0) - 1.0) * (kTwoPi / samples);
}

BoundarySource make_config_source(const ExperimentConfig& cfg) {
    const ScalarField p = parse_field(cfg.p, "p");
    const ScalarField q = parse_field(cfg.q, "q");
    if (!near(constant_value(p), 2.0))
        throw config_error("FEM synthesis requires constant p = 2; use --oracle "
                           "for other exponents");
    const double qv = constant_value(q);
    if (!std::isfinite(qv))
        throw config_error("FEM synthesis requires a constant q");

    const ScalarField sigma = parse_field(cfg.phantom, "phantom");
    const Expr dirichlet = [&] {
        try {
            return Expr::parse(cfg.dirichlet);
        } catch (const expr_error& e) {
            throw config_error(std::string("dirichlet: ") + e.what());
        }
    }();

    DiskMesh mesh = build_disk_mesh(cfg.mesh_h);
    auto sol = std::make_shared<const FemSolution>(solve_conductivity(
        std::move(mesh), [sigma](double x, double y) { return sigma(x, y); },
        [dirichlet](double theta) { return eval_on_circle(dirichlet, theta); }));
    return make_fem_source(sol, sigma, qv, golden_offset(cfg.samples));
}

BoundarySource make_oracle_source_from_specs(const std::vector<std::string>& specs,
                                             const ExperimentConfig& cfg) {
    std::string u_src, sigma_src, p_src = cfg.p, q_src = cfg.q;
    for (const std::string& spec : specs) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos)
            throw config_error("oracle spec '" + spec + "' is not KEY=EXPR");
        const std::string key = spec.substr(0, eq);
        const std::string val = spec.substr(eq + 1);
        if (key == "u")
            u_src = val;
        else if (key == "sigma")
            sigma_src = val;
        else if (key == "p")
            p_src = val;
        else if (key == "q")
            q_src = val;
        else
            throw config_error("oracle spec key '" + key +
                               "' (expected u, sigma, p, or q)");
    }
    if (u_src.empty() || sigma_src.empty())
        throw config_error("oracle synthesis needs both u=EXPR and sigma=EXPR");
    const DifferentiableField u = [&] {
        try {
            return DifferentiableField::from(Expr::parse(u_src));
        } catch (const expr_error& e) {
            throw config_error(std::string("oracle u: ") + e.what());
        }
    }();
    return make_oracle_source(u, parse_field(sigma_src, "oracle sigma"),
                              parse_field(p_src, "p"), parse_field(q_src, "q"));
}

SampleSet synthesize_samples(const BoundarySource& source,
                             const ExperimentConfig& cfg) {
    const SampleSet clean = sample_boundary(source, cfg.samples);
    const bool any_noise = cfg.noise.angular_level > 0.0 ||
                           cfg.noise.neumann_level > 0.0 ||
                           cfg.noise.interior_level > 0.0;
    if (!any_noise) return clean;
    return add_noise(clean, cfg.noise, source);
}

ReconstructionResult reconstruct_samples(const SampleSet& s,
                                         const ExperimentConfig& cfg,
                                         StageRecorder* recorder) {
    const ScalarField p = parse_field(cfg.p, "p");
    const ScalarField q = parse_field(cfg.q, "q");
    const double pv = constant_value(p);
    const double qv = constant_value(q);
    if (near(pv, 2.0) && near(qv, 1.0)) return algorithm1(s, cfg.bounds);
    if (near(pv, 2.0) && near(qv, 2.0))
        return algorithm2(s, cfg.bounds, cfg.kernel_std, recorder);
    return algorithm_general(s, cfg.bounds, p, q, cfg.kernel_std);
}

ReconstructionResult read_result_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open result file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw data_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expect =
        "theta,sigma_est,sigma_est_smoothed,label,sigma_plus,sigma_minus,stopping";
    if (line != expect)
        throw data_error(path + ": unexpected header '" + line + "'");

    ReconstructionResult r;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (f.size() != 7)
            throw data_error(path + ": row " + std::to_string(row) +
                             " has " + std::to_string(f.size()) +
                             " fields, expected 7");
        auto num = [&](const std::string& text, const char* col) {
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size() || text.empty())
                throw data_error(path + ": row " + std::to_string(row) +
                                 ", bad " + col + " value '" + text + "'");
            return v;
        };
        r.thetas.push_back(num(f[0], "theta"));
        r.sigma_est.push_back(num(f[1], "sigma_est"));
        r.sigma_smoothed.push_back(num(f[2], "sigma_est_smoothed"));
        PointLabel label;
        if (f[3] == "decided")
            label = PointLabel::decided;
        else if (f[3] == "propagated")
            label = PointLabel::propagated;
        else if (f[3] == "interpolated")
            label = PointLabel::interpolated;
        else if (f[3] == "undecided")
            label = PointLabel::double_undecided;
        else
            throw data_error(path + ": row " + std::to_string(row) +
                             ", unknown label '" + f[3] + "'");
        r.labels.push_back(label);
        SampleCandidates c;
        if (!f[4].empty() || !f[5].empty()) {
            c.present = true;
            c.sigma_plus = num(f[4], "sigma_plus");
            c.sigma_minus = num(f[5], "sigma_minus");
        }
        r.candidates.push_back(c);
        if (f[6] != "0" && f[6] != "1")
            throw data_error(path + ": row " + std::to_string(row) +
                             ", stopping flag must be 0 or 1");
        r.stopping.push_back(f[6] == "1" ? 1 : 0);
        r.branch.push_back(0);
    }
    if (r.size() == 0) throw data_error(path + ": no data rows");
    return r;
}

void write_metrics_json(const std::string& path, const Metrics& m,
                        const ReconstructionResult& r) {
    nlohmann::json j;
    j["relative_l2"] = m.relative_l2;
    j["relative_l2_smoothed"] = m.relative_l2_smoothed;
    j["max_relative"] = m.max_relative;
    j["decided_fraction"] = m.decided_fraction;
    j["propagated_fraction"] = m.propagated_fraction;
    j["interpolated_fraction"] = m.interpolated_fraction;
    const char* names[3] = {"decided", "propagated", "interpolated"};
    for (int c = 0; c < 3; ++c)
        j["per_label"][names[c]] = {{"count", m.per_label[c].count},
                                    {"relative_l2", m.per_label[c].relative_l2}};
    j["eps_stop"] = r.eps_stop_used;
    j["stopping_points"] = r.set_stopping.size();
    j["double_candidates"] = r.set_double.size();
    j["stop_flanked_interpolation_runs"] = r.stop_flanked_interpolation_runs;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os.good()) throw data_error("failed writing metrics: " + path);
}

void run_synthesize(const ExperimentConfig& cfg, const std::vector<std::string>& oracle,
                    std::ostream& log) {
    const BoundarySource source = oracle.empty()
                                      ? make_config_source(cfg)
                                      : make_oracle_source_from_specs(oracle, cfg);
    const SampleSet samples = synthesize_samples(source, cfg);
    ensure_dir(cfg.out_dir);
    const std::string path = join_path(cfg.out_dir, "samples.csv");
    write_samples_csv(path, samples);
    print_sample_summary(log, samples, path);
}

void run_reconstruct(const ExperimentConfig& cfg, const std::string& samples_csv,
                     std::ostream& log) {
    const SampleSet samples = read_samples_csv(samples_csv);
    const ReconstructionResult r = reconstruct_samples(samples, cfg);
    ensure_dir(cfg.out_dir);
    const std::string path = join_path(cfg.out_dir, "result.csv");
    write_result_csv(path, r);
    log << "wrote " << path << ": " << r.size() << " points\n";
    if (samples.has_truth()) {
        const Metrics m = evaluate(r, samples.sigma_true);
        const std::string mpath = join_path(cfg.out_dir, "metrics.json");
        write_metrics_json(mpath, m, r);
        log << "wrote " << mpath << "\n";
        print_metrics(log, m, r.sigma_smoothed.size() == r.size());
    } else {
        log << "no ground truth in samples; skipping metrics\n";
    }
}

void run_evaluate(const std::string& result_csv, const std::string& samples_csv,
                  const std::string& out_dir, std::ostream& log) {
    const ReconstructionResult r = read_result_csv(result_csv);
    const SampleSet samples = read_samples_csv(samples_csv);
    if (!samples.has_truth())
        throw data_error(samples_csv + " carries no ground truth columns");
    if (samples.size() != r.size())
        throw data_error("length mismatch: result has " + std::to_string(r.size()) +
                         " rows, samples " + std::to_string(samples.size()));
    for (std::size_t j = 0; j < r.size(); ++j)
        if (std::fabs(r.thetas[j] - samples.thetas[j]) >
            1e-12 * std::max(1.0, std::fabs(samples.thetas[j])))
            throw data_error("angle mismatch at row " + std::to_string(j + 2));
    Metrics m;
    try {
        m = evaluate(r, samples.sigma_true);
    } catch (const std::invalid_argument& e) {
        throw data_error(e.what());
    }
    ensure_dir(out_dir);
    const std::string mpath = join_path(out_dir, "metrics.json");
    write_metrics_json(mpath, m, r);
    log << "wrote " << mpath << "\n";
    print_metrics(log, m, r.sigma_smoothed != r.sigma_est);
}

void run_replicate(const std::string& figure, const ExperimentConfig& cfg,
                   std::ostream& log) {
    const BoundarySource source = make_config_source(cfg);
    const SampleSet clean = sample_boundary(source, cfg.samples);
    const bool any_noise = cfg.noise.angular_level > 0.0 ||
                           cfg.noise.neumann_level > 0.0 ||
                           cfg.noise.interior_level > 0.0;
    const SampleSet samples =
        any_noise ? add_noise(clean, cfg.noise, source) : clean;

    ensure_dir(cfg.out_dir);
    const std::string spath = join_path(cfg.out_dir, "samples.csv");
    write_samples_csv(spath, samples);
    print_sample_summary(log, samples, spath);

    StageRecorder rec;
    const ReconstructionResult r = reconstruct_samples(samples, cfg, &rec);
    write_result_csv(join_path(cfg.out_dir, "result.csv"), r);
    for (std::size_t i = 0; i < rec.names.size(); ++i)
        write_stage_csv(join_path(cfg.out_dir, rec.names[i] + ".csv"), r.thetas,
                        rec.estimates[i]);
    const std::vector<double>& smoothed =
        r.sigma_smoothed.size() == r.size() ? r.sigma_smoothed : r.sigma_est;
    write_comparison_csv(join_path(cfg.out_dir, "after_smoothing_comparison.csv"),
                         r.thetas, smoothed, samples.sigma_true);

    const Metrics m = evaluate(r, samples.sigma_true);
    write_metrics_json(join_path(cfg.out_dir, "metrics.json"), m, r);
    log << figure << ": " << rec.names.size() + 1 << " stage files in "
        << cfg.out_dir << "\n";
    print_metrics(log, m, true);
}

int run_main(int argc, const char* const* argv) {
    CLI::App app{"boundary conductivity synthesis and reconstruction"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, samples_path, result_path, figure;
    std::vector<std::string> oracle;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--preset", preset,
                        "built-in preset (paper-fig1, paper-fig2, paper-fig3)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& v) {
                seed = v;
                seed_given = true;
            },
            "noise RNG seed override");
    };

    CLI::App* synth = app.add_subcommand("synthesize", "generate boundary samples");
    add_common(synth);
    synth->add_option("--oracle", oracle,
                      "analytic source: u=EXPR sigma=EXPR [p=EXPR] [q=EXPR]");

    CLI::App* rec = app.add_subcommand("reconstruct", "reconstruct from a sample CSV");
    add_common(rec);
    rec->add_option("samples", samples_path, "sample CSV path")->required();

    CLI::App* ev = app.add_subcommand("evaluate", "compare a result CSV with truth");
    ev->add_option("result", result_path, "result CSV path")->required();
    ev->add_option("samples", samples_path, "sample CSV with truth columns")
        ->required();
    ev->add_option("--out", out_dir, "output directory");

    CLI::App* rep = app.add_subcommand("replicate", "run a full figure experiment");
    add_common(rep);
    rep->add_option("figure", figure, "fig1, fig2, or fig3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        auto resolve = [&]() {
            if (!config_path.empty() && !preset.empty())
                throw config_error("--config and --preset are mutually exclusive; "
                                   "put \"preset\" inside the config file instead");
            ExperimentConfig cfg;
            if (!preset.empty()) cfg = preset_config(preset);
            if (!config_path.empty()) cfg = load_config(config_path);
            if (seed_given) cfg.noise.seed = seed;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            return cfg;
        };
        if (synth->parsed()) {
            run_synthesize(resolve(), oracle, std::cout);
        } else if (rec->parsed()) {
            run_reconstruct(resolve(), samples_path, std::cout);
        } else if (ev->parsed()) {
            run_evaluate(result_path, samples_path,
                         out_dir.empty() ? "." : out_dir, std::cout);
        } else if (rep->parsed()) {
            if (figure != "fig1" && figure != "fig2" && figure != "fig3")
                throw config_error("unknown figure '" + figure +
                                   "' (expected fig1, fig2, fig3)");
            ExperimentConfig cfg;
            if (!config_path.empty() || !preset.empty()) {
                cfg = resolve();
            } else {
                cfg = preset_config(figure);
                if (seed_given) cfg.noise.seed = seed;
                if (!out_dir.empty()) cfg.out_dir = out_dir;
            }
            run_replicate(figure, cfg, std::cout);
        }
        return 0;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace bcr::cli
