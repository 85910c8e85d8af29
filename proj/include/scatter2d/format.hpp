#pragma once

#include <cstdio>
#include <string>

namespace scatter2d::detail {

// Shortest representation that round-trips a double exactly.
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace scatter2d::detail
