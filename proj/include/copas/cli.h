// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: featurize, train, evaluate, screen, scaffold.

#ifndef COPAS_CLI_H_
#define COPAS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace copas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. Returns the process exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace copas

#endif // COPAS_CLI_H_
