#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cea::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kDomainError = 3 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace cea::cli
