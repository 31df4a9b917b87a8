#pragma once

#include "tinylof/dsp.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tinylof {

/// One operating regime of a synthetic vibrating machine.
struct RegimeSpec {
  std::string name;
  double base_hz = 0.0;
  /// Vibration amplitude; zero means only sensor noise.
  double amplitude = 0.0;
};

struct SynthProfile {
  std::string name;
  double sample_rate_hz = 100.0;
  std::size_t channels = 3;
  double noise_sigma = 0.02;
  std::vector<RegimeSpec> regimes;
};

/// Built-in profiles. "fan": three-axis accelerometer on a fan that is off
/// and then runs at three speeds. Throws ConfigError for unknown names.
SynthProfile synth_profile(std::string_view name);
std::vector<std::string> synth_profile_names();

struct SynthStream {
  std::size_t channels = 0;
  std::vector<Sample> samples;
  /// Regime index of each sample.
  std::vector<std::size_t> regime;
  std::vector<std::string> regime_names;
};

/// Splits `duration_s` into equal consecutive segments, one per regime in
/// profile order. Deterministic in (profile, duration, seed).
SynthStream synth_generate(const SynthProfile &profile, double duration_s, std::uint64_t seed);

/// `count` samples of a single regime starting at tick `first_tick`.
SynthStream synth_regime(const SynthProfile &profile, std::size_t regime, std::size_t count,
                         std::uint64_t seed, Tick first_tick = 0);

/// CSV with header `t,ch1..chC,regime`.
void write_synth_csv(std::ostream &out, const SynthStream &stream);

} // namespace tinylof
