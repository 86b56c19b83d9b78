#pragma once

#include <stdexcept>
#include <string>

namespace bcr {

// Configuration problems (bad expressions, bad fields, unknown presets).
// The CLI maps these to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Data problems (malformed CSV, inconsistent sample sets). Exit code 2.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bcr
