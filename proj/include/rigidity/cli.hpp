#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rigidity {

// Full command-line surface of the `rigidity` tool, callable in-process so
// tests can drive it without spawning.  Returns the process exit code:
//   0  success
//   2  a documented precondition or parameter was violated
//   3  a verification ran and was refuted
//  64  unusable command line
//   1  anything else
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rigidity
