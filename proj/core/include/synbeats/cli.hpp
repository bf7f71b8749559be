#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace synbeats {

/**
 * @brief Entry point of the `synbeats` tool.
 *
 * Subcommands: fit, placebo-units, placebo-years, apply, compare, gen-stocks.
 * Settings are layered: built-in defaults, then --config, then
 * SYNBEATS_OUTPUT_DIR for the output directory, then command-line flags.
 * Returns 0 on success and a nonzero code with a message on stderr otherwise.
 */
int run_cli(int argc, const char* const* argv);
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace synbeats
