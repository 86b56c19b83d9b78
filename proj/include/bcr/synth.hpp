#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bcr/expr.hpp"
#include "bcr/oracle.hpp"
#include "bcr/types.hpp"

// Sampling of boundary sources into measurement vectors, the three-channel
// noise model, and the CSV serialization both the CLI and the tests use.

namespace bcr {

struct SampleSet {
    std::vector<double> thetas;              // strictly increasing in [0, 2 pi)
    std::vector<MeasurementTriple> triples;  // one per angle
    std::vector<double> sigma_true;          // empty when truth is unknown
    std::vector<double> n_true;              // paired with sigma_true

    std::size_t size() const { return thetas.size(); }
    bool has_truth() const { return !sigma_true.empty(); }
};

// How a noise level is turned into a standard deviation. The conventional
// reading is a relative standard deviation (level times the clean magnitude,
// or times the grid step for the angular channel). The literal reading takes
// the level times the clean magnitude as a variance instead; it exists
// because the protocol this follows is worded ambiguously.
enum class NoiseReading { relative_sd, literal_variance };

struct NoiseConfig {
    double angular_level = 0.05;
    double neumann_level = 0.05;
    double interior_level = 0.05;
    std::uint64_t seed = 0;
    NoiseReading reading = NoiseReading::relative_sd;
};

// Uniform counterclockwise sampling: theta_j = 2 pi j / M plus the source's
// angular offset (kept below one grid step so the ordering invariant holds).
SampleSet sample_boundary(const BoundarySource& source, int M);

// Tangential gradient magnitude |df/dtheta| on the unit circle, analytic.
double tangential_A(const Expr& f, double theta);

// Same quantity from sampled Dirichlet data on a uniform cyclic grid,
// by central finite differences with step 2 pi / M.
std::vector<double> tangential_A(const std::vector<double>& dirichlet_samples);

// Three-channel Gaussian noise: angular perturbation, relative Neumann noise,
// relative interior noise (clamped at zero). Without a source the angular
// channel can only relabel the stored angles (rows are re-sorted to keep the
// ordering invariant); with a source the data is re-measured at the perturbed
// angle while the stored angle and truth stay nominal, modeling measurement
// at a slightly imprecise position. Deterministic given cfg.seed; the RNG is
// split per sample and per channel, so results do not depend on evaluation
// order.
SampleSet add_noise(const SampleSet& s, const NoiseConfig& cfg);
SampleSet add_noise(const SampleSet& s, const NoiseConfig& cfg,
                    const BoundarySource& source);

void write_samples_csv(std::ostream& os, const SampleSet& s);
void write_samples_csv(const std::string& path, const SampleSet& s);
SampleSet read_samples_csv(std::istream& is);
SampleSet read_samples_csv(const std::string& path);

namespace detail {

// splitmix64; the per-(seed, stream, index) construction gives every noise
// draw its own deterministic state
struct SplitMix64 {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // uniform in (0, 1]
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }
};

// standard normal via Box-Muller, one independent stream per draw
double normal_draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace detail

}  // namespace bcr
