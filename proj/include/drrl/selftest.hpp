#pragma once

#include <iosfwd>

namespace drrl {

/// Quick property checks over every primary module; prints one line per check. Returns 0 when all pass.
int run_selftest(std::ostream& log);

} // namespace drrl
