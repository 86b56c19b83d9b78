#pragma once

#include <string>

#include "bcr/reconstruct.hpp"
#include "bcr/synth.hpp"

// Experiment description: everything one run needs, parseable from a single
// JSON file. Field expressions (phantom, dirichlet, p, q) are strings in the
// x1/x2/theta grammar so configs stay declarative.

namespace bcr {

struct ExperimentConfig {
    std::string phantom = "1";          // conductivity over x1, x2
    std::string dirichlet = "max(0,x1)";  // boundary trace of u
    std::string p = "2";
    std::string q = "2";
    int samples = 100;                  // M, boundary sample count
    double mesh_h = 0.025;              // target FEM edge length
    double kernel_std = -1.0;           // smoothing width; <= 0 means M / 100
    NoiseConfig noise{};
    Bounds bounds{};
    std::string out_dir = ".";
};

// Built-in experiment presets: paper-fig1 (M = 1000, smooth sigmoid ridge
// phantom), paper-fig2 (M = 100, same phantom), paper-fig3 (M = 100,
// oscillatory phantom). fig1/fig2/fig3 are aliases. Throws config_error for
// unknown names.
ExperimentConfig preset_config(const std::string& name);

// Parse a JSON config text / file. Unknown keys are rejected, wrong types
// reported with the offending field path. File variant adds IO errors.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Serialize back to JSON (stable key order); load/parse round-trips.
std::string config_to_json(const ExperimentConfig& c);

}  // namespace bcr
