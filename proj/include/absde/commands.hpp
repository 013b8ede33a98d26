#pragma once
// Batch commands behind the absde executable.

#include "absde/config.hpp"
#include "absde/error.hpp"

#include <filesystem>
#include <ostream>
#include <string_view>

namespace absde {

/// solve | bounds | convergence | oracle-check. Writes the configured CSV and
/// report under `out_dir` (relative output paths only) and a short summary to
/// `log`. Returns 0 when every check passed and 1 on a diagnostic FAIL;
/// errors propagate as exceptions.
int run_command(std::string_view command, const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& log);

/// 2 for configuration problems, 3 for numerical failures.
int exit_status(ErrorCode code);

}  // namespace absde
