#pragma once

#include "tinylof/pipeline.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace tinylof {

/// Flat JSON document mapped onto PipelineConfig. Every key is optional and
/// falls back to the PipelineConfig default; unknown keys are rejected.
///
///   window_len          integer, power of two        (64)
///   stride              integer in [1, window_len]   (32)
///   channels            integer >= 1                 (1)
///   fft_peaks           integer <= window_len / 2    (1)
///   features            "min,max,std,rms,fft_peaks" or an array of names
///   reservoir_capacity  integer >= min_pts + 1       (100)
///   min_pts             integer >= 1                 (10)
///   zero_dist_floor     number > 0                   (1e-9)
///   normalize           bool                         (false)
///   threshold           number > 0                   (2.0)
///   retrain_every       integer >= 1, 0 or null = off (off)
///   seed                integer                      (1)
///
/// Throws ConfigError on syntax errors, wrong types and invalid values.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path &path);

/// Pretty-printed document that parse_config maps back to `cfg`.
std::string config_to_json(const PipelineConfig &cfg);

} // namespace tinylof
