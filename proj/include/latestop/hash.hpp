#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

namespace latestop {

// 64-bit FNV-1a; used for config hashes and dataset fingerprints.
class Fnv1a {
 public:
  void update(const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void update(std::string_view s) noexcept { update(s.data(), s.size()); }

  // Hashes the little-endian byte representation of a trivially copyable value.
  template <typename T>
    requires std::is_trivially_copyable_v<T>
  void update_value(const T& v) noexcept {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    update(bytes, sizeof(T));
  }

  std::uint64_t value() const noexcept { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string to_hex32(std::uint32_t v);
std::string hash_hex(std::string_view s);

}  // namespace latestop
