#pragma once

#include <iosfwd>

namespace krepair {

// Exit codes: 0 success, 2 honest failure (escalation cap, NotFound,
// Infeasible), 1 usage or format error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace krepair
