#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "coherent/config.hpp"

namespace coherent {

using EnvLookup = std::function<const char*(const char*)>;

/// Entry point of the `coherent` tool. `args` excludes the program name.
/// Results go to config.output_path when set, otherwise to `out`; failures
/// print a one-line JSON error record to `err`. Returns 0 on success, 2 for
/// usage and configuration errors, 1 for computation errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env);

/// Runs one subcommand on a resolved configuration and returns the text that
/// would be written. Throws coherent::Error on failure.
std::string run_subcommand(const std::string& subcommand, const RunConfig& config);

}  // namespace coherent
