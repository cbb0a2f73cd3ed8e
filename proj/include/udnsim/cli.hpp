#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace udnsim {

/// Batch entry point. `args` includes the program name. Returns 0 on
/// success, 2 on usage errors (unknown flag, bad value, invalid config)
/// and 1 on runtime failures such as unwritable outputs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

} // namespace udnsim
