#include "latestop/hash.hpp"

#include <cstdio>

namespace latestop {

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

std::string to_hex32(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::string hash_hex(std::string_view s) {
  Fnv1a h;
  h.update(s);
  return h.hex();
}

}  // namespace latestop
