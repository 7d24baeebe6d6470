#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace stils::csv {

/// 17 significant digits: round-trips every double, keeps output byte-stable.
inline std::string format(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

}  // namespace stils::csv
