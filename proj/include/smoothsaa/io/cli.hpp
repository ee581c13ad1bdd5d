#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smoothsaa::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

/**
 * Command-line entry point.
 *
 *   experiment [CONFIG]         run a JSON config (or --config PATH)
 *   table6 PRESET               run a built-in bias/variance table experiment
 *   kernels                     print the kernel moment table
 *   bandwidth RULE DATA_FILE    print the bandwidth chosen for a data file
 *
 * Shared flags: --seed, --out, --format (repeatable), --threads,
 * --replications. SMOOTHSAA_SEED overrides the config seed and --seed
 * overrides both.
 *
 * Returns 0 on success, 1 on a usage, config or I/O error and 2 on a
 * numerical failure or an ordering violation.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same as above; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smoothsaa::io
