#pragma once

#include "tinylof/dsp.hpp"
#include "tinylof/lof.hpp"
#include "tinylof/reservoir.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

namespace tinylof {

struct PipelineConfig {
  DspConfig dsp;
  std::size_t reservoir_capacity = 100;
  LofParams lof;
  /// Scores strictly above this are flagged anomalous.
  double threshold = 2.0;
  /// Retrain automatically after this many training-phase vectors.
  std::optional<std::size_t> retrain_every;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const PipelineConfig &) const = default;
};

enum class Phase : std::uint8_t { Training, Detecting };
std::string_view phase_name(Phase p) noexcept;

struct NoEvent {};

/// A training-phase vector went to the reservoir. `retrained` carries the
/// model size when this vector also triggered an automatic retrain.
struct VectorSampled {
  Tick window_end = 0;
  OfferDecision decision;
  std::optional<std::size_t> retrained;
};

struct Retrained {
  std::size_t points = 0;
};

struct Scored {
  Tick window_end = 0;
  double score = 0.0;
  bool is_anomaly = false;
};

using PipelineEvent = std::variant<NoEvent, VectorSampled, Retrained, Scored>;

/// Byte counts under 32-bit float storage and 16-bit neighbour indices.
struct MemoryFootprint {
  std::size_t window = 0;
  std::size_t reservoir = 0;
  std::size_t model_header = 0;
  std::size_t model_points = 0;
  std::size_t model_k_dist = 0;
  std::size_t model_lrd = 0;
  std::size_t model_neighbors = 0;
  std::size_t model_scaling = 0;

  std::size_t model() const noexcept {
    return model_header + model_points + model_k_dist + model_lrd + model_neighbors +
           model_scaling;
  }
  std::size_t total() const noexcept { return window + reservoir + model(); }

  bool operator==(const MemoryFootprint &) const = default;
};

/// Worst-case bytes for the window buffer, a full reservoir and a model
/// trained on it. Depends only on the configuration.
MemoryFootprint memory_footprint(const PipelineConfig &cfg);

/// Bytes a given model occupies under the same accounting.
MemoryFootprint model_footprint(const LofModel &model);

/// Windowed DSP feeding either the reservoir (training) or the scorer
/// (detection). Detection never touches the reservoir or the model.
class Pipeline {
public:
  explicit Pipeline(PipelineConfig cfg);

  PipelineEvent step(const Sample &s);

  /// Switches phase and clears the window buffer. Entering Detecting needs
  /// a model; with `auto_train` the reservoir is trained first whenever it
  /// changed since the last training (or no model exists).
  void set_phase(Phase phase, bool auto_train = false);

  /// Trains on the current reservoir contents and swaps the model in.
  /// min_pts is clamped to m - 1 for small reservoirs.
  Retrained train_now();

  /// Starts a fresh sample (enrolment with reset instead of continued
  /// sampling). The current model is kept.
  void reset_reservoir() noexcept {
    reservoir_.clear();
    stale_ = true;
  }

  /// True when the reservoir changed after the current model was trained.
  bool model_stale() const noexcept { return stale_; }

  Phase phase() const noexcept { return phase_; }
  const PipelineConfig &config() const noexcept { return cfg_; }
  const Reservoir &reservoir() const noexcept { return reservoir_; }
  const WindowState &window() const noexcept { return window_; }
  std::shared_ptr<const LofModel> model() const noexcept { return model_; }

  std::uint64_t vectors_sampled() const noexcept { return sampled_; }
  std::uint64_t vectors_scored() const noexcept { return scored_; }
  std::uint64_t retrain_count() const noexcept { return retrains_; }

  /// Bytes currently held by pipeline-owned buffers.
  MemoryFootprint accounted_bytes() const;

private:
  PipelineConfig cfg_;
  Phase phase_ = Phase::Training;
  WindowState window_;
  Reservoir reservoir_;
  std::shared_ptr<const LofModel> model_;
  std::uint64_t sampled_ = 0;
  std::uint64_t scored_ = 0;
  std::uint64_t retrains_ = 0;
  std::uint64_t since_retrain_ = 0;
  bool stale_ = false;
};

} // namespace tinylof
