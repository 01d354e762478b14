#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gd {

// The geodeduce command line. Exit 0 on success, 1 when the problem is unsolvable or inconsistent,
// 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gd
