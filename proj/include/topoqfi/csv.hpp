#pragma once

#include <string>

namespace topoqfi::csv {

/// Shortest decimal representation that round-trips to the same double.
std::string number(double value);

}  // namespace topoqfi::csv
