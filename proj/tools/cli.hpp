#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mutabench::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRunFailed = 1;
inline constexpr int kUsage = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mutabench::cli
