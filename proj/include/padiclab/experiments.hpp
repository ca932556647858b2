#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "padiclab/config.hpp"

namespace padiclab {

/// Result of one experiment run: the tab-separated table (header comment
/// lines, a column line, then rows) and a structured mirror of the same
/// data.  Runs are deterministic: a fixed config produces byte-identical
/// lines and json regardless of thread count.  Theorem-level violations are
/// not stored here; the runners raise TheoremViolation and abort instead.
struct ExperimentOutcome {
    std::vector<std::string> tsv;
    nlohmann::ordered_json data;
};

/// Dispatch on cfg.experiment.kind.  threads = 0 means hardware default.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

/// Individual drivers, exposed for tests.
/// Periodic-point gap table: for m up to the period bound, enumerate the
/// F^m-fixed points, classify membership in the variety at the configured
/// precision, and tabulate the running minimum distance over nonmembers.
/// The minimum collapsing below half the membership precision aborts with
/// TheoremViolation.
ExperimentOutcome run_tv_gap(const ExperimentConfig& cfg, unsigned threads = 0);

/// Invariance report: for a hypersurface, the total divisibility test plus
/// the periodic-point density table; for several generators, sampled
/// evidence only.  A verified-invariant variety that a periodic member
/// still escapes under one forward step aborts with TheoremViolation.
ExperimentOutcome run_dmm_check(const ExperimentConfig& cfg, unsigned threads = 0);

/// Backward-orbit gap table: builds a coherent backward orbit from the
/// start point (canonical, random, or all branches), tabulates distances
/// to the variety, reports the gap over nonmembers, and for member-bearing
/// runs the residue covering index and closure ideal, whose Frobenius
/// stability is mandatory (TheoremViolation otherwise).  An obstructed
/// fiber ends the table early and is reported as the extension frontier.
ExperimentOutcome run_backward_dml(const ExperimentConfig& cfg, unsigned threads = 0);

/// Tilting report: audits the shift/Frobenius equivariance on a backward
/// orbit of the start point (when one is configured) and tilts the
/// canonical orbit of every periodic point up to the period bound; each
/// tilt must be the constant series of its residue (TheoremViolation
/// otherwise).
ExperimentOutcome run_tilt_demo(const ExperimentConfig& cfg, unsigned threads = 0);

/// Write <dir>/<base>.tsv and <dir>/<base>.json, creating dir if needed.
void write_outcome(const ExperimentOutcome& out, const std::string& dir,
                   const std::string& base);

} // namespace padiclab
