#pragma once

#include <cstdio>
#include <string>

namespace sdcnn {

// Shortest exact decimal form used for all CSV output; parsing it back
// recovers the same double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace sdcnn
