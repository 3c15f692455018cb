#pragma once

#include <string>

namespace layoutforge {

/// Shortest decimal text that parses back to the same double; "-0" becomes "0".
std::string format_double(double v);

/// printf-style fixed notation with `digits` decimals; negative zero is printed as zero.
std::string format_fixed(double v, int digits);

}  // namespace layoutforge
