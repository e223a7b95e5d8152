#pragma once

#include <string>

namespace gfsub {

/// Shortest decimal text that round-trips the double exactly.
std::string format_exact(double value);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

}  // namespace gfsub
