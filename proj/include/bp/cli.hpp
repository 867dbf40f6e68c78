#pragma once

#include <string>
#include <vector>

namespace bp {

// Full command-line surface, callable in-process. args excludes the program
// name; the return value is the process exit code (0 success, 2 validation,
// 3 degenerate input, 4 I/O).
int cli_main(const std::vector<std::string>& args);

}  // namespace bp
