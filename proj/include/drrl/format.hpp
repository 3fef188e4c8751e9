#pragma once

#include <cstdio>
#include <string>

namespace drrl {

/// Round-trip decimal form used in every CSV payload.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace drrl
