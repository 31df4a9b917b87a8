#pragma once

#include "tinylof/dsp.hpp"
#include "tinylof/lof.hpp"

#include <optional>
#include <string>

namespace tinylof {

struct EmitOptions {
  std::string symbol_prefix = "tinylof";
  /// Only 32-bit floats are emitted.
  int float_bits = 32;
  /// Also emit <prefix>_extract_features (needs a DspConfig).
  bool include_dsp = false;
  /// Free text placed in the leading comment of both files.
  std::string banner;
};

struct EmittedSources {
  std::string header_name;
  std::string header;
  std::string source_name;
  std::string source;
};

/// True for a C identifier that leaves room for the emitted suffixes.
bool is_valid_symbol_prefix(const std::string &prefix);

/// Renders the model as a C99 header/source pair:
///
///   const float <prefix>_points[N * D], <prefix>_k_dist[N], <prefix>_lrd[N];
///   float <prefix>_lof_score(const float *features);
///   void  <prefix>_extract_features(const float *window, float *features);
///
/// The scorer reproduces score() in float arithmetic with the same neighbour
/// tie-breaking; the extractor mirrors compute_features() over a sample-major
/// W x C window. Output depends only on the inputs (no timestamps), uses no
/// heap and no I/O, and needs only <math.h>.
///
/// Throws ConfigError on an invalid prefix, a float width other than 32, or
/// include_dsp without a DspConfig matching the model dimension.
EmittedSources emit_c_model(const LofModel &model, const std::optional<DspConfig> &dsp,
                            const EmitOptions &opts);

/// Plain-text summary of the model (sizes, memory, feature layout).
std::string emit_manifest(const LofModel &model, const std::optional<DspConfig> &dsp,
                          const EmitOptions &opts);

} // namespace tinylof
