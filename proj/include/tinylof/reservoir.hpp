#pragma once

#include "tinylof/dsp.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace tinylof {

/// Outcome of offering one vector to the reservoir. `slot` is the 0-based
/// index written for Appended/Replaced.
struct OfferDecision {
  enum class Kind : std::uint8_t { Appended, Replaced, Rejected };
  Kind kind = Kind::Rejected;
  std::size_t slot = 0;

  bool operator==(const OfferDecision &) const = default;
};

/// Fixed-capacity uniform sample of a stream (Algorithm R).
///
/// The n-th offered item (n > k) draws j uniformly from [1, n] and replaces
/// slot j - 1 when j <= k. Draws come from std::mt19937_64 reduced to a
/// range by rejection sampling.
class Reservoir {
public:
  Reservoir(std::size_t capacity, std::size_t dim, std::uint64_t seed = 1);

  OfferDecision offer(const FeatureVector &v);

  /// Copy of the stored vectors in slot order.
  std::vector<FeatureVector> snapshot() const { return items_; }

  /// Empties the sample and the seen counter. The RNG keeps its state.
  void clear() noexcept;

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return items_.size(); }
  std::uint64_t seen() const noexcept { return seen_; }
  bool empty() const noexcept { return items_.empty(); }

  /// Reals currently held (size * dim) and the bound capacity * dim.
  std::size_t stored_reals() const noexcept { return items_.size() * dim_; }
  std::size_t capacity_reals() const noexcept { return capacity_ * dim_; }

  std::uint64_t fingerprint() const noexcept;

private:
  std::uint64_t uniform_below(std::uint64_t bound);

  std::size_t capacity_;
  std::size_t dim_;
  std::uint64_t seen_ = 0;
  std::vector<FeatureVector> items_;
  std::mt19937_64 rng_;
};

} // namespace tinylof
