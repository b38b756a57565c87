#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace riskrel::cli {

/// Runs one command line (without the program name). Failures are reported
/// on `err` as a single line `riskrel: error[<Code>]: <message>`; the return
/// value is the process exit status (0 success, 1 runtime error, 2 usage).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace riskrel::cli
