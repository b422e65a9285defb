#pragma once

// Scenario execution and artifact writing behind the command-line verbs.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cislunar/finetune.hpp"
#include "cislunar/scenario.hpp"

namespace cislunar {

namespace fs = std::filesystem;

/// CISLUNAR_OUT_DIR when set and non-empty, otherwise "out".
fs::path default_out_dir();

struct CheckVerdict {
    RateCheck check;
    double measured = 0.0;  // us/day
    bool pass = false;
};

std::vector<CheckVerdict> evaluate_checks(const Scenario& scenario, const Truth& truth);

struct RunArtifacts {
    std::vector<fs::path> files;
    std::vector<CheckVerdict> verdicts;
    bool all_checks_pass() const;
};

/// Simulates the scenario's architecture(s) and writes event_trace.csv,
/// ensemble.csv, offset_graph.csv, adev.csv, cycle_residuals.csv and
/// summary.json into out_dir.
RunArtifacts run_scenario(const Scenario& scenario, const fs::path& out_dir);

struct SweepSummary {
    std::size_t samples = 0;
    double epsilon = 0.0;
    double faithfulness = 0.0;
    double max_norm_of_passing = 0.0;  // largest |v - 1|_inf among passing samples; 0 when none pass
    std::size_t passing = 0;
    SweepResult tuned;
    SweepResult secular_off;
    SweepResult drift_off;
};

/// Latin-hypercube sweep over the scenario's correction families plus the
/// three reference vectors. Writes sweep.csv and sweep_summary.json.
SweepSummary run_sweep(const Scenario& scenario, const fs::path& out_dir, unsigned threads = 0);

/// Writes model_swap.csv for two named conventions of the scenario.
ModelSwapResult run_compare_models(const Scenario& scenario, const std::string& conv_a, const std::string& conv_b,
                                   const fs::path& out_dir);

/// Human-readable digest of summary.json (and sweep_summary.json if present).
void print_report(const fs::path& out_dir, std::ostream& out);

}  // namespace cislunar
