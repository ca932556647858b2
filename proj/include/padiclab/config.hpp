#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "padiclab/errors.hpp"

namespace padiclab {

/// Parsed form of one experiment description.  The file format is plain-text
/// blocks
///
///   field      { p = 2  r = 2  prec = 32  eisenstein = [2, 0, 1] }
///   map        { s = 1  N = 1  P = [x0*x1, 0] }
///   variety    { generators = [x0 - x1] }
///   experiment { kind = tv_gap  period_bound = 6  seed = 0 }
///   output     { path = run_name }
///
/// with one `key = value` per line, `#` comments, and bracketed lists that
/// may span lines.  Unknown blocks or keys are rejected rather than ignored
/// so a typo cannot silently change an experiment.
struct FieldBlock {
    long long p = 2;
    int r = 1;
    int prec = 32;
    std::vector<long long> eisenstein; // monic coefficients low to high; empty = unramified
};

struct MapBlock {
    long long s = 1;
    int N = 1;
    std::vector<std::string> perturbations; // N+1 polynomial strings, "0" allowed
};

struct ExperimentBlock {
    std::string kind; // tv_gap | dmm_check | backward_dml | tilt_demo
    long long period_bound = 4;
    long long depth = 6;
    long long precision = 8;  // report / membership precision in p-digits
    int degree_bound = 2;     // closure degree for covering reports
    std::uint64_t seed = 0;
    std::string branch = "canonical"; // canonical | random | all
    std::vector<std::string> start;   // coordinates: integers or T(g^k); empty = none
    long long l_bound = 6;            // invariance search bound
};

struct ExperimentConfig {
    FieldBlock field;
    MapBlock map;
    std::vector<std::string> variety_generators; // empty when no variety block
    ExperimentBlock experiment;
    std::string output_path;
};

/// Parse a config from text / from a file.  Raises ConfigError with the line
/// number on malformed input, unknown keys, or missing required entries.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

} // namespace padiclab
