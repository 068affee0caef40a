#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace qcorr {

/// Fixed CSV number format: 15 significant digits, '.' decimal separator.
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline void csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << cells[i];
    }
    out << '\n';
}

inline void csv_numeric_row(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out << ',';
        out << csv_number(values[i]);
    }
    out << '\n';
}

}  // namespace qcorr
