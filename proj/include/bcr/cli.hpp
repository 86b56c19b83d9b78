#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bcr/config.hpp"
#include "bcr/oracle.hpp"
#include "bcr/reconstruct.hpp"
#include "bcr/synth.hpp"

// Command layer: each subcommand as a library function (the binary is a thin
// wrapper), so tests can drive full pipelines in-process. All functions
// throw config_error for configuration problems and data_error for broken
// input data; the binary maps those to exit codes 1 and 2.

namespace bcr::cli {

// Conventional sampling offset for FEM sources: the golden-ratio fraction of
// one grid step, so sample angles never coincide with mesh vertex angles.
double golden_offset(int samples);

// Boundary source a config describes: FEM solve of the phantom with the
// config's Dirichlet data (requires constant p = 2 and constant q).
BoundarySource make_config_source(const ExperimentConfig& cfg);

// Analytic source from --oracle KEY=EXPR pairs (u=, sigma=, optional p=, q=
// overriding the config's exponents).
BoundarySource make_oracle_source_from_specs(const std::vector<std::string>& specs,
                                             const ExperimentConfig& cfg);

// Clean samples plus the config's noise model.
SampleSet synthesize_samples(const BoundarySource& source, const ExperimentConfig& cfg);

// Dispatch on the config's exponents: p=2, q=1 -> algorithm1; p=2, q=2 ->
// algorithm2; anything else -> the general pointwise pipeline.
ReconstructionResult reconstruct_samples(const SampleSet& s, const ExperimentConfig& cfg,
                                         StageRecorder* recorder = nullptr);

// Result CSV reader (inverse of write_result_csv), for the evaluate command.
ReconstructionResult read_result_csv(const std::string& path);

void write_metrics_json(const std::string& path, const Metrics& m,
                        const ReconstructionResult& r);

// Subcommand bodies. out_dir comes from the config; log receives the human
// summary lines.
void run_synthesize(const ExperimentConfig& cfg, const std::vector<std::string>& oracle,
                    std::ostream& log);
void run_reconstruct(const ExperimentConfig& cfg, const std::string& samples_csv,
                     std::ostream& log);
void run_evaluate(const std::string& result_csv, const std::string& samples_csv,
                  const std::string& out_dir, std::ostream& log);
void run_replicate(const std::string& figure, const ExperimentConfig& cfg,
                   std::ostream& log);

// Full argv interface; returns the process exit code (0 ok, 1 config error,
// 2 data error).
int run_main(int argc, const char* const* argv);

}  // namespace bcr::cli
