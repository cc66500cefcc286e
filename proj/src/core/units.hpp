#pragma once

#include <cmath>

namespace cranhet {

// dBm <-> watts. All internal computation is in linear units; dBm is
// accepted only at the config boundary.
inline double dbm_to_watts(double x_dbm) {
    return std::pow(10.0, (x_dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double x_w) {
    return 10.0 * std::log10(x_w) + 30.0;
}

} // namespace cranhet
