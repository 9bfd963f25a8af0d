#pragma once

#include <string>

namespace obsdict {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

}  // namespace obsdict
