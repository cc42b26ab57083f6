#pragma once

#include <iosfwd>

namespace roughmle {

/// Entry point of the `roughmle` tool. Returns 0 on success, 2 when a
/// verification check fails, 1 on error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roughmle
