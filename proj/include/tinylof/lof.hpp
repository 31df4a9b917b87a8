#pragma once

#include "tinylof/dsp.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tinylof {

/// Dense row-major m x d matrix of points.
class PointSet {
public:
  PointSet() = default;
  PointSet(std::size_t rows, std::size_t dim);
  PointSet(std::size_t rows, std::size_t dim, std::vector<double> values);

  static PointSet from_vectors(std::span<const FeatureVector> vectors);
  static PointSet from_rows(const std::vector<std::vector<double>> &rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const PointSet &) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept;

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  bool operator==(const Neighbor &) const = default;
};

/// Exact brute-force k nearest neighbours of `query`, sorted by distance with
/// ties going to the lower index. `exclude` removes one row from the scan.
std::vector<Neighbor> knn(const PointSet &points, std::span<const double> query, std::size_t k,
                          std::optional<std::size_t> exclude = std::nullopt);

struct LofParams {
  std::size_t min_pts = 10;
  double zero_dist_floor = 1e-9;
  /// Fit a per-feature min-max scaling on the training set and apply it to
  /// queries.
  bool normalize = false;

  void validate() const;
  bool operator==(const LofParams &) const = default;
};

/// Per-feature affine map x -> (x - offset) * scale.
struct FeatureScaling {
  std::vector<double> offset;
  std::vector<double> scale;

  static FeatureScaling fit(const PointSet &points);
  void apply(std::span<double> values) const noexcept;
  bool empty() const noexcept { return offset.empty(); }

  bool operator==(const FeatureScaling &) const = default;
};

/// Trained novelty-detection model. Immutable once built by train().
class LofModel {
public:
  LofModel() = default;

  /// Reassembles a model from its arrays (used by deserialization). Checks
  /// shapes and the positivity invariants.
  LofModel(PointSet points, std::vector<double> k_dist, std::vector<double> lrd,
           std::vector<std::uint16_t> neighbors, LofParams params, FeatureScaling scaling = {});

  const PointSet &points() const noexcept { return points_; }
  std::span<const double> k_dist() const noexcept { return k_dist_; }
  std::span<const double> lrd() const noexcept { return lrd_; }
  /// Row-major m x min_pts neighbour indices.
  std::span<const std::uint16_t> neighbors() const noexcept { return neighbors_; }
  std::span<const std::uint16_t> neighbors_of(std::size_t i) const noexcept {
    return {neighbors_.data() + i * params_.min_pts, params_.min_pts};
  }
  const LofParams &params() const noexcept { return params_; }
  const FeatureScaling &scaling() const noexcept { return scaling_; }

  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  std::size_t min_pts() const noexcept { return params_.min_pts; }

  std::uint64_t fingerprint() const noexcept;

  bool operator==(const LofModel &) const = default;

private:
  friend LofModel train(const PointSet &, const LofParams &);

  PointSet points_;
  std::vector<double> k_dist_;
  std::vector<double> lrd_;
  std::vector<std::uint16_t> neighbors_;
  LofParams params_;
  FeatureScaling scaling_;
};

/// Largest training set a model can hold (neighbour indices are 16-bit).
inline constexpr std::size_t kMaxModelPoints = 65535;

/// Builds the k-distance, neighbourhood and local reachability density
/// arrays. Costs O(m^2 d) time and O(m (min_pts + d)) memory.
///
/// Throws InsufficientPointsError when m <= min_pts and InputError on
/// non-finite input.
LofModel train(const PointSet &points, const LofParams &params);

/// Novelty score of `query` against the frozen model: the mean ratio of the
/// neighbours' lrd to the query's lrd. About 1 inside the training density,
/// larger outside it. O(m d).
double score(const LofModel &model, std::span<const double> query);

} // namespace tinylof
