#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pivlp::cli {

inline constexpr const char* kTableEnvVar = "PIVLP_W_TABLE";

// Exit codes: 0 success (whatever the statistical decision), 1 operational
// failure, 2 usage error. Failures print a JSON object {"error": {...}} to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pivlp::cli
