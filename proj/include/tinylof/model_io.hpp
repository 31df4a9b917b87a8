#pragma once

#include "tinylof/lof.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tinylof {

/// Versioned little-endian model layout:
///
///   offset  size  field
///        0     4  magic "TLOF"
///        4     4  u32 version (1)
///        8     4  u32 m (points)
///       12     4  u32 d (dimension)
///       16     4  u32 min_pts
///       20     8  f64 zero_dist_floor
///       28     4  u32 flags (bit 0: feature scaling present)
///       32        f32 points[m * d] row-major, f32 k_dist[m], f32 lrd[m],
///                 u16 neighbors[m * min_pts],
///                 then f32 offset[d], f32 scale[d] when bit 0 is set
inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::size_t kModelHeaderBytes = 32;

std::vector<std::byte> serialize_model(const LofModel &model);

/// Throws FormatError on bad magic, unknown version, truncation, trailing
/// bytes or arrays that break model invariants.
LofModel deserialize_model(std::span<const std::byte> bytes);

void save_model(const LofModel &model, const std::filesystem::path &path);
LofModel load_model(const std::filesystem::path &path);

/// Round-trips the model arrays through 32-bit floats, yielding the model a
/// loaded file or generated firmware would see.
LofModel quantize_to_float32(const LofModel &model);

} // namespace tinylof
