#include "tinylof/pipeline.hpp"

#include "tinylof/error.hpp"
#include "tinylof/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tinylof {

std::string_view phase_name(Phase p) noexcept {
  return p == Phase::Training ? "train" : "detect";
}

void PipelineConfig::validate() const {
  dsp.validate();
  lof.validate();
  if (reservoir_capacity == 0)
    throw ConfigError("reservoir_capacity must be >= 1");
  if (reservoir_capacity < lof.min_pts + 1)
    throw ConfigError("reservoir_capacity must be at least min_pts + 1");
  if (reservoir_capacity > kMaxModelPoints)
    throw ConfigError("reservoir_capacity exceeds " + std::to_string(kMaxModelPoints));
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    throw ConfigError("threshold must be a positive finite value");
  if (retrain_every && *retrain_every == 0)
    throw ConfigError("retrain_every must be >= 1 when set");
}

MemoryFootprint memory_footprint(const PipelineConfig &cfg) {
  cfg.validate();
  const std::size_t k = cfg.reservoir_capacity;
  const std::size_t d = cfg.dsp.feature_dim();
  MemoryFootprint f;
  f.window = cfg.dsp.window_len * cfg.dsp.channels * sizeof(float);
  f.reservoir = k * d * sizeof(float);
  f.model_header = kModelHeaderBytes;
  f.model_points = k * d * sizeof(float);
  f.model_k_dist = k * sizeof(float);
  f.model_lrd = k * sizeof(float);
  f.model_neighbors = k * cfg.lof.min_pts * sizeof(std::uint16_t);
  f.model_scaling = cfg.lof.normalize ? 2 * d * sizeof(float) : 0;
  return f;
}

MemoryFootprint model_footprint(const LofModel &model) {
  MemoryFootprint f;
  const std::size_t m = model.size();
  f.model_header = kModelHeaderBytes;
  f.model_points = m * model.dim() * sizeof(float);
  f.model_k_dist = m * sizeof(float);
  f.model_lrd = m * sizeof(float);
  f.model_neighbors = m * model.min_pts() * sizeof(std::uint16_t);
  f.model_scaling = model.scaling().empty() ? 0 : 2 * model.dim() * sizeof(float);
  return f;
}

Pipeline::Pipeline(PipelineConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))), window_(cfg_.dsp),
      reservoir_(cfg_.reservoir_capacity, cfg_.dsp.feature_dim(), cfg_.seed) {}

PipelineEvent Pipeline::step(const Sample &s) {
  if (phase_ == Phase::Detecting && !model_)
    throw InvalidStateError("detecting without a trained model");

  auto vec = window_.push(s);
  if (!vec)
    return NoEvent{};

  if (phase_ == Phase::Detecting) {
    const double value = score(*model_, vec->values);
    ++scored_;
    return Scored{vec->window_end, value, value > cfg_.threshold};
  }

  VectorSampled ev;
  ev.window_end = vec->window_end;
  ev.decision = reservoir_.offer(*vec);
  if (ev.decision.kind != OfferDecision::Kind::Rejected)
    stale_ = true;
  ++sampled_;
  ++since_retrain_;
  if (cfg_.retrain_every && since_retrain_ >= *cfg_.retrain_every && reservoir_.size() >= 2)
    ev.retrained = train_now().points;
  return ev;
}

void Pipeline::set_phase(Phase phase, bool auto_train) {
  if (phase == Phase::Detecting && (!model_ || (auto_train && stale_))) {
    if (!auto_train)
      throw InvalidStateError("cannot enter detection phase without a trained model");
    if (reservoir_.size() < 2)
      throw InvalidStateError("cannot enter detection phase: reservoir holds " +
                              std::to_string(reservoir_.size()) + " vectors");
    train_now();
  }
  phase_ = phase;
  window_.reset();
}

Retrained Pipeline::train_now() {
  const std::size_t m = reservoir_.size();
  if (m < 2)
    throw InsufficientPointsError("training needs at least 2 reservoir vectors, have " +
                                  std::to_string(m));
  LofParams params = cfg_.lof;
  params.min_pts = std::min(params.min_pts, m - 1);
  const auto snapshot = reservoir_.snapshot();
  model_ = std::make_shared<const LofModel>(train(PointSet::from_vectors(snapshot), params));
  ++retrains_;
  since_retrain_ = 0;
  stale_ = false;
  return Retrained{m};
}

MemoryFootprint Pipeline::accounted_bytes() const {
  MemoryFootprint f = model_ ? model_footprint(*model_) : MemoryFootprint{};
  f.window = window_.accounted_bytes();
  f.reservoir = reservoir_.stored_reals() * sizeof(float);
  return f;
}

} // namespace tinylof
