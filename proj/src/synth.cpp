#include "tinylof/synth.hpp"

#include "tinylof/error.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

namespace tinylof {

namespace {

constexpr double kGravity = 9.81;

// Box-Muller normals on raw mt19937_64 output.
class NoiseSource {
public:
  explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct RegimePhases {
  double x = 0.0;
  double y = 0.0;
  double wobble = 0.0;
};

void append_samples(SynthStream &out, const SynthProfile &profile, std::size_t regime,
                    std::size_t count, Tick first_tick, NoiseSource &noise,
                    const RegimePhases &ph) {
  const auto &spec = profile.regimes.at(regime);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < count; ++i) {
    const Tick tick = first_tick + i;
    const double t = static_cast<double>(tick) / profile.sample_rate_hz;
    // Amplitude wobble and speed drift so windows of one regime differ. Both
    // periods are a few seconds, so a regime is stationary over ~5 s.
    const double amp = spec.amplitude * (1.0 + 0.05 * std::sin(two_pi * 0.7 * t + ph.wobble));
    // Phase of f0 * (1 + 0.01 sin(w t)), integrated.
    const double w = two_pi * 0.4;
    const double angle = two_pi * spec.base_hz * (t - 0.01 * std::cos(w * t) / w);

    Sample s;
    s.t = tick;
    s.channels.resize(profile.channels);
    for (std::size_t c = 0; c < profile.channels; ++c) {
      double v = 0.0;
      switch (c % 3) {
      case 0:
        v = amp * std::sin(angle + ph.x);
        break;
      case 1:
        v = 0.6 * amp * std::sin(angle + ph.y) + 0.3 * amp * std::sin(2.0 * angle);
        break;
      default:
        v = kGravity + 0.4 * amp * std::sin(angle);
        break;
      }
      s.channels[c] = v + profile.noise_sigma * noise.normal();
    }
    out.samples.push_back(std::move(s));
    out.regime.push_back(regime);
  }
}

RegimePhases draw_phases(NoiseSource &noise) {
  const double two_pi = 2.0 * std::numbers::pi;
  RegimePhases ph;
  ph.x = two_pi * noise.uniform();
  ph.y = two_pi * noise.uniform();
  ph.wobble = two_pi * noise.uniform();
  return ph;
}

SynthStream empty_stream(const SynthProfile &profile) {
  SynthStream out;
  out.channels = profile.channels;
  for (const auto &r : profile.regimes)
    out.regime_names.push_back(r.name);
  return out;
}

} // namespace

SynthProfile synth_profile(std::string_view name) {
  if (name == "fan") {
    SynthProfile p;
    p.name = "fan";
    // Speeds fall on bins 8, 12 and 17 at 100 Hz with W = 64.
    p.regimes = {
        {"off", 0.0, 0.0},
        {"speed1", 12.5, 0.8},
        {"speed2", 18.75, 1.1},
        {"speed3", 26.5625, 1.4},
    };
    return p;
  }
  throw ConfigError("unknown synth profile '" + std::string(name) + "'");
}

std::vector<std::string> synth_profile_names() { return {"fan"}; }

SynthStream synth_generate(const SynthProfile &profile, double duration_s, std::uint64_t seed) {
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s))
    throw ConfigError("duration must be a non-negative number of seconds");
  SynthStream out = empty_stream(profile);
  NoiseSource noise(seed);
  const auto total = static_cast<std::size_t>(std::llround(duration_s * profile.sample_rate_hz));
  const std::size_t n_regimes = profile.regimes.size();
  out.samples.reserve(total);
  out.regime.reserve(total);
  Tick tick = 0;
  for (std::size_t r = 0; r < n_regimes; ++r) {
    const std::size_t end = total * (r + 1) / n_regimes;
    const auto ph = draw_phases(noise);
    append_samples(out, profile, r, end - tick, tick, noise, ph);
    tick = end;
  }
  return out;
}

SynthStream synth_regime(const SynthProfile &profile, std::size_t regime, std::size_t count,
                         std::uint64_t seed, Tick first_tick) {
  if (regime >= profile.regimes.size())
    throw ConfigError("regime index out of range");
  SynthStream out = empty_stream(profile);
  NoiseSource noise(seed);
  const auto ph = draw_phases(noise);
  append_samples(out, profile, regime, count, first_tick, noise, ph);
  return out;
}

void write_synth_csv(std::ostream &out, const SynthStream &stream) {
  out << "t";
  for (std::size_t c = 0; c < stream.channels; ++c)
    out << ",ch" << c + 1;
  out << ",regime\n";
  char buf[32];
  for (std::size_t i = 0; i < stream.samples.size(); ++i) {
    const auto &s = stream.samples[i];
    out << s.t;
    for (double v : s.channels) {
      std::snprintf(buf, sizeof(buf), ",%.6f", v);
      out << buf;
    }
    out << ',' << stream.regime_names.at(stream.regime[i]) << '\n';
  }
}

} // namespace tinylof
