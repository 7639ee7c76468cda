#pragma once

#include <iosfwd>

namespace spellforge {

// The `spellforge` command line. Returns 0 on success, 1 on a usage error and
// 2 on a runtime error; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace spellforge
