#pragma once

#include <cstdint>
#include <span>

namespace tinylof {

/// 64-bit FNV-1a, used for content fingerprints of reservoirs and models.
class Fingerprint {
public:
  void add_bytes(std::span<const std::byte> bytes) noexcept {
    for (auto b : bytes) {
      state_ ^= static_cast<std::uint64_t>(b);
      state_ *= 0x100000001b3ULL;
    }
  }

  template <typename T> void add(const T &value) noexcept {
    add_bytes(std::as_bytes(std::span<const T, 1>(&value, 1)));
  }

  template <typename T> void add_range(std::span<const T> values) noexcept {
    add(values.size());
    add_bytes(std::as_bytes(values));
  }

  std::uint64_t value() const noexcept { return state_; }

private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

} // namespace tinylof
