#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcr/fields.hpp"
#include "bcr/pointwise.hpp"
#include "bcr/synth.hpp"
#include "bcr/types.hpp"

// The two boundary reconstruction algorithms. Algorithm 1 covers the
// current-density regime (p = 2, q = 1), where recovery is unique wherever
// A differs from zero. Algorithm 2 covers the power-density regime
// (p = q = 2), where most samples carry two candidates and the estimate is
// assembled by bounds filtering, branch propagation between decided anchors
// and stopping points, cyclic interpolation, and circular smoothing.

namespace bcr {

struct Bounds {
    double sigma_lo = 0.1;
    double sigma_hi = 10.0;
    // stopping threshold for the candidate gap |n+| - |n-|; unset means
    // 0.05 * median(|n+|) over the double candidates of the sample set
    std::optional<double> eps_stop{};
    double eq_tol = 1e-9;  // scale-relative equality precision
};

enum class PointLabel {
    decided,            // accepted a candidate directly
    double_undecided,   // transient: double candidate not yet resolved
    propagated,         // branch assigned by propagation between anchors
    interpolated        // filled by cyclic interpolation
};

const char* label_name(PointLabel l);

struct SampleCandidates {
    bool present = false;
    double sigma_plus = 0.0;
    double sigma_minus = 0.0;
    double n_plus = 0.0;
    double n_minus = 0.0;
    double n_gap = 0.0;  // |n_plus| - |n_minus|
};

struct ReconstructionResult {
    std::vector<double> thetas;
    std::vector<double> sigma_est;
    std::vector<double> sigma_smoothed;  // filled by gaussian_smooth
    std::vector<PointLabel> labels;
    std::vector<char> stopping;          // the S set, as flags
    std::vector<SampleCandidates> candidates;
    // branch bookkeeping: bit 1 = estimate equals the plus candidate,
    // bit 2 = equals the minus candidate (3 when the candidates coincide)
    std::vector<int> branch;

    // diagnostics
    std::vector<int> set_double;     // D: indices with two distinct candidates
    std::vector<int> set_stopping;   // S
    std::vector<int> undecided_history;  // U right after classification
    double eps_stop_used = 0.0;
    int stop_flanked_interpolation_runs = 0;  // undecided runs whose both
                                              // neighbors-of-record were stops

    std::size_t size() const { return sigma_est.size(); }
};

// Snapshots of sigma_est at the named pipeline stages, for the figure
// protocol. Values are NaN where the stage has not assigned an estimate yet.
struct StageRecorder {
    std::vector<std::string> names;
    std::vector<std::vector<double>> estimates;
    void capture(const std::string& name, const std::vector<double>& est) {
        names.push_back(name);
        estimates.push_back(est);
    }
};

// p = 2, q = 1 pipeline: closed-form estimate, bounds filter, interpolation.
ReconstructionResult algorithm1(const SampleSet& s, const Bounds& b);

// First stage of the p = q = 2 pipeline: per-sample case split, candidate
// computation, bounds filtering, stopping-point detection.
ReconstructionResult classify_points(
    const SampleSet& s, const Bounds& b,
    AetDiscriminant form = AetDiscriminant::consistent);

// Second stage: cyclic branch propagation between anchors (decided doubles)
// and stopping points. Mutates labels, estimates, and branch records.
void propagate_choices(ReconstructionResult& r, const Bounds& b);

// Third stage: periodic linear interpolation in theta across undecided gaps.
void interpolate_undecided(ReconstructionResult& r);

// Circular Gaussian smoothing of a cyclic sequence; kernel truncated at four
// standard deviations and normalized to unit sum. std <= 0 is the identity.
std::vector<double> gaussian_smooth(const std::vector<double>& values,
                                    double kernel_std_samples);

// Full p = q = 2 pipeline. kernel_std_samples <= 0 selects the default
// M / 100. The recorder, when given, captures the six stage snapshots.
ReconstructionResult algorithm2(const SampleSet& s, const Bounds& b,
                                double kernel_std_samples = -1.0,
                                StageRecorder* recorder = nullptr,
                                AetDiscriminant form = AetDiscriminant::consistent);

// Pipeline for other exponent pairs: per-sample general recovery, bounds
// filtering, interpolation, smoothing; no propagation stage (the branch
// ordering theory behind it is specific to p = q = 2).
ReconstructionResult algorithm_general(const SampleSet& s, const Bounds& b,
                                       const ScalarField& p, const ScalarField& q,
                                       double kernel_std_samples = -1.0);

struct LabelMetrics {
    int count = 0;
    double relative_l2 = 0.0;
};

struct Metrics {
    double relative_l2 = 0.0;
    double relative_l2_smoothed = 0.0;
    double max_relative = 0.0;
    double decided_fraction = 0.0;
    double propagated_fraction = 0.0;
    double interpolated_fraction = 0.0;
    LabelMetrics per_label[3];  // decided, propagated, interpolated
};

Metrics evaluate(const ReconstructionResult& r, const std::vector<double>& sigma_true);

// Result serialization: CSV with candidate columns left empty where absent,
// plus the JSON metrics sidecar.
void write_result_csv(std::ostream& os, const ReconstructionResult& r);
void write_result_csv(const std::string& path, const ReconstructionResult& r);

}  // namespace bcr
