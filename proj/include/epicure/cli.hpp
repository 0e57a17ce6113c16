#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace epicure {

/// Exit codes: 0 completed or every bound held, 2 a bound was violated,
/// 1 usage or input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace epicure
