#include "textcausal/common/hash.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

namespace textcausal {

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

Fingerprint& Fingerprint::add(std::string_view bytes) {
  // Length prefix so that ("ab","c") and ("a","bc") differ.
  add(static_cast<std::int64_t>(bytes.size()));
  state_ = fnv1a64(bytes, state_);
  return *this;
}

Fingerprint& Fingerprint::add(double value) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  char raw[8];
  for (int i = 0; i < 8; ++i) raw[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  state_ = fnv1a64(std::string_view(raw, 8), state_);
  return *this;
}

Fingerprint& Fingerprint::add(std::int64_t value) {
  auto bits = static_cast<std::uint64_t>(value);
  char raw[8];
  for (int i = 0; i < 8; ++i) raw[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  state_ = fnv1a64(std::string_view(raw, 8), state_);
  return *this;
}

}  // namespace textcausal
