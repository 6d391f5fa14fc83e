#pragma once
// Experiment runner behind the CLI. Each experiment takes one JSON config,
// writes diagnostics.csv and summary.json into the output directory (the
// summary is written even when the run fails), and reports through the shared
// exit-code taxonomy: 0 success, 2 config error, 3 numerical failure or a
// failed check, 4 I/O error.

#include "enls/serialize.hpp"

#include <filesystem>

namespace enls {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_io = 4 };

struct RunResult {
    int exit_code = exit_ok;
    json summary;
};

// experiments: simulate, equilibrium-check, perturbed, blowup, sphere-lemma,
// operator-compare, scattering-probe
RunResult run(const json& config, const std::filesystem::path& out_dir);

// drift report between the diagnostics.csv files of two completed runs
json compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b);

} // namespace enls
