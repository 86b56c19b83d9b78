#include "bcr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bcr/errors.hpp"

namespace bcr {

namespace detail {

double normal_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    SplitMix64 g{seed ^ ((stream + 1) * 0x9E3779B97F4A7C15ull) ^
                 ((index + 1) * 0xD1B54A32D192ED03ull)};
    g.next();
    const double u1 = g.uniform01();
    const double u2 = g.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace detail

SampleSet sample_boundary(const BoundarySource& source, int M) {
    if (M < 4) throw std::invalid_argument("sample_boundary: M must be at least 4");
    if (!source.measure)
        throw std::invalid_argument("sample_boundary: source has no measure function");
    const double step = 2.0 * M_PI / M;
    double offset = std::fmod(source.angular_offset, step);
    if (offset < 0.0) offset += step;

    SampleSet s;
    s.thetas.resize(static_cast<std::size_t>(M));
    s.triples.resize(static_cast<std::size_t>(M));
    const bool truth = static_cast<bool>(source.sigma_true) &&
                       static_cast<bool>(source.n_true);
    if (truth) {
        s.sigma_true.resize(static_cast<std::size_t>(M));
        s.n_true.resize(static_cast<std::size_t>(M));
    }
    for (int j = 0; j < M; ++j) {
        const double theta = step * j + offset;
        const std::size_t k = static_cast<std::size_t>(j);
        s.thetas[k] = theta;
        s.triples[k] = source.measure(theta);
        if (truth) {
            s.sigma_true[k] = source.sigma_true(theta);
            s.n_true[k] = source.n_true(theta);
        }
    }
    return s;
}

double tangential_A(const Expr& f, double theta) {
    return std::fabs(circle_derivative(f, theta));
}

std::vector<double> tangential_A(const std::vector<double>& dirichlet_samples) {
    const std::size_t m = dirichlet_samples.size();
    if (m < 3) throw std::invalid_argument("tangential_A: need at least 3 samples");
    const double step = 2.0 * M_PI / static_cast<double>(m);
    std::vector<double> a(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double fwd = dirichlet_samples[(j + 1) % m];
        const double bwd = dirichlet_samples[(j + m - 1) % m];
        a[j] = std::fabs((fwd - bwd) / (2.0 * step));
    }
    return a;
}

namespace {

enum NoiseStream : std::uint64_t { angular = 1, neumann = 2, interior = 3 };

double channel_sd(const NoiseConfig& cfg, double level, double clean_scale) {
    if (level == 0.0) return 0.0;
    if (cfg.reading == NoiseReading::relative_sd) return level * clean_scale;
    return std::sqrt(level * clean_scale);
}

// noise on N and H, shared by both angular conventions
void perturb_values(SampleSet& s, const NoiseConfig& cfg) {
    for (std::size_t j = 0; j < s.size(); ++j) {
        MeasurementTriple& t = s.triples[j];
        if (cfg.neumann_level > 0.0) {
            const double sd = channel_sd(cfg, cfg.neumann_level, std::fabs(t.N));
            t.N += sd * detail::normal_draw(cfg.seed, NoiseStream::neumann, j);
        }
        if (cfg.interior_level > 0.0) {
            const double sd = channel_sd(cfg, cfg.interior_level, std::fabs(t.H));
            t.H += sd * detail::normal_draw(cfg.seed, NoiseStream::interior, j);
            if (t.H < 0.0) t.H = 0.0;
        }
    }
}

}  // namespace

SampleSet add_noise(const SampleSet& s, const NoiseConfig& cfg) {
    SampleSet out = s;
    if (cfg.angular_level > 0.0 && !s.thetas.empty()) {
        const double step = 2.0 * M_PI / static_cast<double>(s.size());
        const double sd = channel_sd(cfg, cfg.angular_level, step);
        for (std::size_t j = 0; j < out.size(); ++j) {
            double t = out.thetas[j] +
                       sd * detail::normal_draw(cfg.seed, NoiseStream::angular, j);
            t = std::fmod(t, 2.0 * M_PI);
            if (t < 0.0) t += 2.0 * M_PI;
            out.thetas[j] = t;
        }
        // relabeled angles may be out of order; restore the cyclic invariant
        std::vector<std::size_t> order(out.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out.thetas[a] < out.thetas[b];
        });
        SampleSet sorted;
        sorted.thetas.reserve(out.size());
        sorted.triples.reserve(out.size());
        if (out.has_truth()) {
            sorted.sigma_true.reserve(out.size());
            sorted.n_true.reserve(out.size());
        }
        for (std::size_t j : order) {
            sorted.thetas.push_back(out.thetas[j]);
            sorted.triples.push_back(out.triples[j]);
            if (out.has_truth()) {
                sorted.sigma_true.push_back(out.sigma_true[j]);
                sorted.n_true.push_back(out.n_true[j]);
            }
        }
        out = std::move(sorted);
    }
    perturb_values(out, cfg);
    return out;
}

SampleSet add_noise(const SampleSet& s, const NoiseConfig& cfg,
                    const BoundarySource& source) {
    SampleSet out = s;
    if (cfg.angular_level > 0.0 && source.measure && !s.thetas.empty()) {
        const double step = 2.0 * M_PI / static_cast<double>(s.size());
        const double sd = channel_sd(cfg, cfg.angular_level, step);
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double actual =
                out.thetas[j] +
                sd * detail::normal_draw(cfg.seed, NoiseStream::angular, j);
            // measured at the true position, recorded at the nominal one
            out.triples[j] = source.measure(actual);
        }
    }
    perturb_values(out, cfg);
    return out;
}

namespace {

void append_field(std::string& line, double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

}  // namespace

void write_samples_csv(std::ostream& os, const SampleSet& s) {
    const bool truth = s.has_truth();
    os << (truth ? "theta,A,N,H,sigma_true,n_true\n" : "theta,A,N,H\n");
    std::string line;
    for (std::size_t j = 0; j < s.size(); ++j) {
        line.clear();
        append_field(line, s.thetas[j]);
        line += ',';
        append_field(line, s.triples[j].A);
        line += ',';
        append_field(line, s.triples[j].N);
        line += ',';
        append_field(line, s.triples[j].H);
        if (truth) {
            line += ',';
            append_field(line, s.sigma_true[j]);
            line += ',';
            append_field(line, s.n_true[j]);
        }
        line += '\n';
        os << line;
    }
}

void write_samples_csv(const std::string& path, const SampleSet& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open for writing: " + path);
    write_samples_csv(os, s);
    if (!os.good()) throw data_error("failed writing samples: " + path);
}

SampleSet read_samples_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw data_error("empty sample CSV");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    bool truth = false;
    if (header == "theta,A,N,H,sigma_true,n_true")
        truth = true;
    else if (header != "theta,A,N,H")
        throw data_error("unrecognized sample CSV header: " + header);

    SampleSet s;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[6];
        const int want = truth ? 6 : 4;
        const char* p = line.c_str();
        char* end = nullptr;
        for (int k = 0; k < want; ++k) {
            v[k] = std::strtod(p, &end);
            if (end == p)
                throw data_error("sample CSV line " + std::to_string(lineno) +
                                 ": bad number in field " + std::to_string(k + 1));
            p = end;
            if (k + 1 < want) {
                if (*p != ',')
                    throw data_error("sample CSV line " + std::to_string(lineno) +
                                     ": expected ',' after field " +
                                     std::to_string(k + 1));
                ++p;
            }
        }
        if (*p != '\0')
            throw data_error("sample CSV line " + std::to_string(lineno) +
                             ": trailing content");
        s.thetas.push_back(v[0]);
        s.triples.push_back({v[1], v[2], v[3]});
        if (truth) {
            s.sigma_true.push_back(v[4]);
            s.n_true.push_back(v[5]);
        }
    }
    if (s.thetas.empty()) throw data_error("sample CSV has no rows");
    for (std::size_t j = 1; j < s.thetas.size(); ++j)
        if (!(s.thetas[j] > s.thetas[j - 1]))
            throw data_error("sample CSV angles are not strictly increasing at row " +
                             std::to_string(j + 1));
    return s;
}

SampleSet read_samples_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open sample CSV: " + path);
    return read_samples_csv(is);
}

}  // namespace bcr
