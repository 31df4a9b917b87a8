#include "tinylof/dsp.hpp"

#include "tinylof/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

namespace tinylof {

namespace {

constexpr Feature kScalarFeatures[] = {Feature::Min, Feature::Max, Feature::Std, Feature::Rms};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

// In-place iterative radix-2 transform, decimation in time.
void fft_inplace(std::vector<std::complex<double>> &a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1)
      j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(len);
      const std::complex<double> w = std::polar(1.0, angle);
      for (std::size_t start = 0; start < n; start += len) {
        const auto u = a[start + k];
        const auto v = a[start + k + half] * w;
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }
}

} // namespace

std::string_view feature_name(Feature f) noexcept {
  switch (f) {
  case Feature::Min:
    return "min";
  case Feature::Max:
    return "max";
  case Feature::Std:
    return "std";
  case Feature::Rms:
    return "rms";
  case Feature::FftPeaks:
    return "fft_peaks";
  }
  return "?";
}

FeatureMask FeatureMask::parse(std::string_view list) {
  FeatureMask mask;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto token = trim(list.substr(0, comma));
    list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
    if (token.empty())
      continue;
    bool known = false;
    for (auto f : {Feature::Min, Feature::Max, Feature::Std, Feature::Rms, Feature::FftPeaks}) {
      if (token == feature_name(f)) {
        mask.set(f);
        known = true;
      }
    }
    if (!known)
      throw ConfigError("unknown feature '" + std::string(token) + "'");
  }
  return mask;
}

std::string FeatureMask::to_string() const {
  std::string out;
  for (auto f : {Feature::Min, Feature::Max, Feature::Std, Feature::Rms, Feature::FftPeaks}) {
    if (!has(f))
      continue;
    if (!out.empty())
      out += ',';
    out += feature_name(f);
  }
  return out;
}

void DspConfig::validate() const {
  if (window_len < 2 || !std::has_single_bit(window_len))
    throw ConfigError("window_len must be a power of two >= 2, got " +
                      std::to_string(window_len));
  if (stride < 1 || stride > window_len)
    throw ConfigError("stride must lie in [1, window_len], got " + std::to_string(stride));
  if (channels < 1)
    throw ConfigError("channels must be >= 1");
  if (fft_peaks > window_len / 2)
    throw ConfigError("fft_peaks must be <= window_len / 2, got " + std::to_string(fft_peaks));
  if (feature_dim() == 0)
    throw ConfigError("feature mask selects no features");
}

std::vector<std::string> feature_layout(const DspConfig &cfg) {
  std::vector<std::string> names;
  names.reserve(cfg.feature_dim());
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    const std::string ch = "ch" + std::to_string(c + 1) + ".";
    for (auto f : kScalarFeatures)
      if (cfg.features.has(f))
        names.push_back(ch + std::string(feature_name(f)));
    for (std::size_t p = 0; p < cfg.effective_peaks(); ++p) {
      const std::string peak = ch + "peak" + std::to_string(p);
      names.push_back(peak + ".bin");
      names.push_back(peak + ".mag");
    }
  }
  return names;
}

std::vector<double> fft_magnitudes(std::span<const double> window) {
  const std::size_t n = window.size();
  if (n < 2 || !std::has_single_bit(n))
    throw ConfigError("fft length must be a power of two >= 2");
  std::vector<std::complex<double>> buf(window.begin(), window.end());
  fft_inplace(buf);
  std::vector<double> mags(n / 2);
  for (std::size_t k = 1; k <= n / 2; ++k)
    mags[k - 1] = std::abs(buf[k]);
  return mags;
}

std::vector<Peak> top_peaks(std::span<const double> spectrum, std::size_t count) {
  std::vector<Peak> candidates;
  candidates.reserve(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    if (spectrum[i] > 0.0)
      candidates.push_back({i, spectrum[i]});

  const auto by_magnitude = [](const Peak &a, const Peak &b) {
    return a.magnitude != b.magnitude ? a.magnitude > b.magnitude : a.bin < b.bin;
  };
  const std::size_t keep = std::min(count, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), by_magnitude);
  candidates.resize(keep);
  candidates.resize(count, Peak{});
  return candidates;
}

FeatureVector compute_features(std::span<const double> block, const DspConfig &cfg,
                               Tick window_end) {
  const std::size_t w = cfg.window_len;
  const std::size_t channels = cfg.channels;
  if (block.size() != w * channels)
    throw InputError("window block has " + std::to_string(block.size()) + " values, expected " +
                     std::to_string(w * channels));

  FeatureVector out;
  out.window_end = window_end;
  out.values.reserve(cfg.feature_dim());

  std::vector<double> series(w);
  // spectrum[0] is the DC slot and stays zero so it never wins a peak.
  std::vector<double> spectrum(w / 2 + 1, 0.0);
  const double half = static_cast<double>(w / 2);

  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < w; ++i)
      series[i] = block[i * channels + c];

    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : series) {
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / static_cast<double>(w);
    double dev_sq = 0.0;
    for (double x : series)
      dev_sq += (x - mean) * (x - mean);

    if (cfg.features.has(Feature::Min))
      out.values.push_back(*lo);
    if (cfg.features.has(Feature::Max))
      out.values.push_back(*hi);
    if (cfg.features.has(Feature::Std))
      out.values.push_back(std::sqrt(dev_sq / static_cast<double>(w)));
    if (cfg.features.has(Feature::Rms))
      out.values.push_back(std::sqrt(sum_sq / static_cast<double>(w)));

    if (const std::size_t peaks = cfg.effective_peaks(); peaks > 0) {
      const auto mags = fft_magnitudes(series);
      std::copy(mags.begin(), mags.end(), spectrum.begin() + 1);
      for (const Peak &p : top_peaks(spectrum, peaks)) {
        out.values.push_back(static_cast<double>(p.bin) / half);
        out.values.push_back(p.magnitude);
      }
    }
  }
  return out;
}

WindowState::WindowState(const DspConfig &cfg) : cfg_(cfg) {
  cfg_.validate();
  ring_.assign(cfg_.window_len * cfg_.channels, 0.0);
  scratch_.assign(ring_.size(), 0.0);
}

void WindowState::reset() noexcept {
  head_ = 0;
  filled_ = 0;
  pushed_ = 0;
  last_t_.reset();
}

std::optional<FeatureVector> WindowState::push(const Sample &s) {
  const std::size_t channels = cfg_.channels;
  if (s.channels.size() != channels)
    throw InputError("sample has " + std::to_string(s.channels.size()) + " channels, expected " +
                     std::to_string(channels));
  for (double v : s.channels)
    if (!std::isfinite(v))
      throw InputError("sample contains a non-finite value");
  if (last_t_ && s.t < *last_t_)
    throw InputError("sample timestamps must be non-decreasing");
  last_t_ = s.t;

  std::copy(s.channels.begin(), s.channels.end(),
            ring_.begin() + static_cast<std::ptrdiff_t>(head_ * channels));
  head_ = (head_ + 1) % cfg_.window_len;
  filled_ = std::min(filled_ + 1, cfg_.window_len);
  ++pushed_;

  if (filled_ < cfg_.window_len || (pushed_ - cfg_.window_len) % cfg_.stride != 0)
    return std::nullopt;

  // Unroll the ring so the oldest sample comes first.
  const std::size_t split = head_ * channels;
  std::copy(ring_.begin() + static_cast<std::ptrdiff_t>(split), ring_.end(), scratch_.begin());
  std::copy(ring_.begin(), ring_.begin() + static_cast<std::ptrdiff_t>(split),
            scratch_.begin() + static_cast<std::ptrdiff_t>(ring_.size() - split));
  return compute_features(scratch_, cfg_, s.t);
}

} // namespace tinylof
