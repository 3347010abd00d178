#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pathlab/config.hpp"

namespace pathlab::cli {

/// Exit-status contract of the command-line tool.
enum ExitStatus : int { kExitPass = 0, kExitOperational = 1, kExitCriteriaFailed = 2 };

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutputDirEnv = "PATHLAB_OUTPUT_DIR";

struct ExecutionResult {
    int exit_status = kExitPass;
    std::filesystem::path results_file;
    std::filesystem::path metadata_file;
    std::string summary;  // one human-readable line
};

/// Resolves spec.output_path against output_dir (or $PATHLAB_OUTPUT_DIR, or the
/// working directory when output_dir is empty).
[[nodiscard]] std::filesystem::path resolve_output(const ExperimentSpec& spec,
                                                   const std::filesystem::path& output_dir = {});

/// Runs the experiment, writes the results file and a "<results>.meta.json"
/// sidecar. Experiment failures return kExitCriteriaFailed with results still
/// written; I/O and argument errors return kExitOperational.
[[nodiscard]] ExecutionResult execute(const ExperimentSpec& spec,
                                      const std::filesystem::path& output_dir = {});

/// "%.17g" formatting used for every number in CSV output.
[[nodiscard]] std::string format_number(double value);

}  // namespace pathlab::cli
