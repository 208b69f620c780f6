#include "topoqfi/csv.hpp"

#include <charconv>

namespace topoqfi::csv {

std::string number(double value) {
  char buf[32];
  auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

}  // namespace topoqfi::csv
