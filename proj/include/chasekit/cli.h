// Command-line front end. Exit codes: 0 success, 1 reasoning-level failure
// (failing chase), 2 usage or input errors.

#ifndef CHASEKIT_CLI_H_
#define CHASEKIT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace chasekit {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chasekit

#endif  // CHASEKIT_CLI_H_
