#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stratwave::cli {

enum ExitCode : int { kPass = 0, kError = 1, kVerdictFail = 2, kUsage = 64 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace stratwave::cli
