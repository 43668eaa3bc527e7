#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace fcp {

// 64-bit FNV-1a, used for in-memory state fingerprints.
class Fnv1a {
 public:
  void add(std::span<const std::uint8_t> bytes);
  void add(std::string_view s);
  template <typename T>
  void add_value(T v) {
    add(std::span(reinterpret_cast<const std::uint8_t*>(&v), sizeof(v)));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::uint64_t v);

// Lower-case hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace fcp
