#ifndef PINN_CLI_APP_HPP
#define PINN_CLI_APP_HPP

#include <string>
#include <vector>

namespace pinn::cli {

// Command-line entry point (subcommands: train, sweep, theory, reference).
// Returns the process exit code: 0 ok, 2 usage error, 3 numerical failure.
int run(int argc, const char* const* argv);

// In-process variant for tests; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace pinn::cli

#endif
