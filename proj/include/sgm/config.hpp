#pragma once

#include "sgm/activator.hpp"
#include "sgm/harness.hpp"

#include <string>

namespace sgm {

// A run description read from an INI-style file.  The fixed-point options
// travel alongside the run spec; their window and barrier fields are filled
// in at the point of use from the data being solved.
struct FileConfig {
    RunSpec spec;
    PicardOptions picard;
    double picard_safety = 1.01;
};

// Parses configuration text.  Recognized sections are [model], [grid],
// [stochastic], [integrator], [picard], [monitor] and [run]; every key has a
// default, so an empty string is a valid configuration.  Unknown sections or
// keys, malformed values, and inconsistent grid dimensions raise ConfigError.
// Lines starting with '#' or ';' are comments; values run to the end of the
// line, so inline comments are not supported.
FileConfig parse_config_text(const std::string& text);

// Reads `path` and parses it.  An unreadable file raises ConfigError.
FileConfig load_config(const std::string& path);

} // namespace sgm
