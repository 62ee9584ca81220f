#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polarlab::cli {

/// Exit status: 0 success, 2 validation error, 1 runtime error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace polarlab::cli
