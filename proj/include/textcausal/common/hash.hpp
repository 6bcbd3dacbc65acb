#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace textcausal {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// FNV-1a over raw bytes. Stable across platforms (byte oriented).
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t state = kFnvOffset) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

// splitmix64 finalizer; used to decorrelate hash bits and derive seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

std::string to_hex(std::uint64_t value);

// Incremental content hasher used for dataset / fold / training-set
// fingerprints.
class Fingerprint {
 public:
  Fingerprint& add(std::string_view bytes);
  Fingerprint& add(double value);
  Fingerprint& add(std::int64_t value);
  std::uint64_t value() const { return state_; }
  std::string hex() const { return to_hex(state_); }

 private:
  std::uint64_t state_ = kFnvOffset;
};

}  // namespace textcausal
