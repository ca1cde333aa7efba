#include "mvdepth/types.hpp"

namespace mvd {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace mvd
