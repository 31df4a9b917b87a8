#include "tinylof/reservoir.hpp"

#include "tinylof/error.hpp"
#include "tinylof/fingerprint.hpp"

#include <cmath>
#include <string>

namespace tinylof {

Reservoir::Reservoir(std::size_t capacity, std::size_t dim, std::uint64_t seed)
    : capacity_(capacity), dim_(dim), rng_(seed) {
  if (capacity_ == 0)
    throw ConfigError("reservoir capacity must be >= 1");
  if (dim_ == 0)
    throw ConfigError("reservoir dimension must be >= 1");
  items_.reserve(capacity_);
}

std::uint64_t Reservoir::uniform_below(std::uint64_t bound) {
  // Reject the low (2^64 mod bound) outputs so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng_();
    if (r >= threshold)
      return r % bound;
  }
}

OfferDecision Reservoir::offer(const FeatureVector &v) {
  if (v.values.size() != dim_)
    throw InputError("feature vector has dimension " + std::to_string(v.values.size()) +
                     ", reservoir expects " + std::to_string(dim_));
  for (double x : v.values)
    if (!std::isfinite(x))
      throw InputError("feature vector contains a non-finite value");

  ++seen_;
  if (items_.size() < capacity_) {
    items_.push_back(v);
    return {OfferDecision::Kind::Appended, items_.size() - 1};
  }
  const std::uint64_t j = uniform_below(seen_);
  if (j < capacity_) {
    items_[j] = v;
    return {OfferDecision::Kind::Replaced, static_cast<std::size_t>(j)};
  }
  return {OfferDecision::Kind::Rejected, 0};
}

void Reservoir::clear() noexcept {
  items_.clear();
  seen_ = 0;
}

std::uint64_t Reservoir::fingerprint() const noexcept {
  Fingerprint fp;
  fp.add(seen_);
  for (const auto &item : items_) {
    fp.add(item.window_end);
    fp.add_range(std::span<const double>(item.values));
  }
  return fp.value();
}

} // namespace tinylof
