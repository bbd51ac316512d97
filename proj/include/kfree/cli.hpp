#pragma once

#include <string>
#include <vector>

namespace kfree {

// Parses and runs one tool invocation. Exit status: 0 success, 1 a
// verification or computation failed, 2 usage error.
int run_cli(int argc, char** argv);

// Same, for in-process callers; args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace kfree
