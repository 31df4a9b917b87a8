#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tinylof {

using Tick = std::uint64_t;

/// One timestamped multi-channel sensor reading.
struct Sample {
  Tick t = 0;
  std::vector<double> channels;
};

/// Indicators computed per channel. The enum order is the on-wire feature
/// order: scalars first, then FFT peak pairs.
enum class Feature : std::uint8_t { Min = 0, Max, Std, Rms, FftPeaks };

class FeatureMask {
public:
  constexpr FeatureMask() = default;

  static constexpr FeatureMask all() noexcept {
    FeatureMask m;
    m.bits_ = 0x1f;
    return m;
  }
  static constexpr FeatureMask scalars() noexcept {
    FeatureMask m;
    m.bits_ = 0x0f;
    return m;
  }
  /// Parses a comma separated list such as "min,max,std,rms,fft_peaks".
  static FeatureMask parse(std::string_view list);

  constexpr FeatureMask &set(Feature f) noexcept {
    bits_ |= bit(f);
    return *this;
  }
  constexpr bool has(Feature f) const noexcept { return (bits_ & bit(f)) != 0; }
  constexpr std::size_t scalar_count() const noexcept {
    std::size_t n = 0;
    for (auto f : {Feature::Min, Feature::Max, Feature::Std, Feature::Rms})
      n += has(f) ? 1 : 0;
    return n;
  }
  std::string to_string() const;

  constexpr bool operator==(const FeatureMask &) const = default;

private:
  static constexpr std::uint8_t bit(Feature f) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
  }
  std::uint8_t bits_ = 0;
};

std::string_view feature_name(Feature f) noexcept;

struct DspConfig {
  std::size_t window_len = 64;
  std::size_t stride = 32;
  std::size_t channels = 1;
  std::size_t fft_peaks = 1;
  FeatureMask features = FeatureMask::all();

  /// Throws ConfigError unless the window is a power of two, the stride lies
  /// in [1, window_len], at least one channel exists and the peak count fits
  /// in the half spectrum.
  void validate() const;

  /// Peak pairs actually emitted (zero when fft_peaks is masked out).
  std::size_t effective_peaks() const noexcept {
    return features.has(Feature::FftPeaks) ? fft_peaks : 0;
  }
  std::size_t features_per_channel() const noexcept {
    return features.scalar_count() + 2 * effective_peaks();
  }
  std::size_t feature_dim() const noexcept {
    return channels * features_per_channel();
  }

  bool operator==(const DspConfig &) const = default;
};

struct FeatureVector {
  std::vector<double> values;
  Tick window_end = 0;

  bool operator==(const FeatureVector &) const = default;
};

/// Human-readable name of every feature slot, e.g. "ch2.rms" or
/// "ch1.peak0.bin". Length equals cfg.feature_dim().
std::vector<std::string> feature_layout(const DspConfig &cfg);

/// Magnitudes |X_k| of the unnormalized DFT for bins 1..W/2 of a
/// rectangular-windowed real signal. Index 0 of the result is bin 1.
std::vector<double> fft_magnitudes(std::span<const double> window);

struct Peak {
  std::size_t bin = 0;
  double magnitude = 0.0;

  bool operator==(const Peak &) const = default;
};

/// The `count` largest nonzero entries of `spectrum` (bin = position in the
/// span), by descending magnitude with ties going to the lower bin. Missing
/// slots are filled with {0, 0}.
std::vector<Peak> top_peaks(std::span<const double> spectrum, std::size_t count);

/// Features of one full window. `block` is sample-major: block[i * C + c] is
/// channel c of the i-th oldest sample.
FeatureVector compute_features(std::span<const double> block, const DspConfig &cfg,
                               Tick window_end = 0);

/// Sliding-window buffer. Emits a feature vector once W samples have been
/// seen and then every S samples.
class WindowState {
public:
  explicit WindowState(const DspConfig &cfg);

  std::optional<FeatureVector> push(const Sample &s);

  /// Drops buffered samples; the next emission again needs W fresh samples.
  void reset() noexcept;

  const DspConfig &config() const noexcept { return cfg_; }
  std::size_t buffered() const noexcept { return filled_; }
  std::uint64_t pushed() const noexcept { return pushed_; }

  /// Bytes of sample storage under 32-bit float accounting.
  std::size_t accounted_bytes() const noexcept { return ring_.size() * sizeof(float); }

private:
  DspConfig cfg_;
  std::vector<double> ring_;
  std::vector<double> scratch_;
  std::size_t head_ = 0;
  std::size_t filled_ = 0;
  std::uint64_t pushed_ = 0;
  std::optional<Tick> last_t_;
};

} // namespace tinylof
