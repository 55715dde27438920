#pragma once

#include <string>
#include <vector>

namespace elemvae::cli {

/// Parse and run one CLI invocation (argv without the program name).
/// Returns the process exit code. All file outputs are deterministic for a
/// fixed argument list.
int run_cli(const std::vector<std::string>& args);

}  // namespace elemvae::cli
