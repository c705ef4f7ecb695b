#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace holv::cli {

// Runs one command line (without the program name). Returns the exit code:
// 0 success, including verdicts that fail; 2 input error; 3 method not
// applicable; 4 numerical failure; 1 for anything unexpected.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holv::cli
