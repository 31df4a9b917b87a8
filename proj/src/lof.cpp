#include "tinylof/lof.hpp"

#include "tinylof/error.hpp"
#include "tinylof/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tinylof {

namespace {

void check_finite(std::span<const double> values, const char *what) {
  for (double v : values)
    if (!std::isfinite(v))
      throw InputError(std::string(what) + " contains a non-finite value");
}

bool nearer(const Neighbor &a, const Neighbor &b) noexcept {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

// Leaves the k nearest rows in the first k slots of `buf`, in rank order when
// `sorted`. Inputs are already validated.
void select_nearest(const PointSet &points, std::span<const double> query, std::size_t k,
                    std::optional<std::size_t> exclude, std::vector<Neighbor> &buf,
                    bool sorted = true) {
  buf.clear();
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (exclude && i == *exclude)
      continue;
    buf.push_back({i, euclidean_distance(points.row(i), query)});
  }
  // (distance, index) is a strict total order, so selection is deterministic.
  const auto kth = buf.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(buf.begin(), kth - 1, buf.end(), nearer);
  if (sorted)
    std::sort(buf.begin(), kth, nearer);
}

} // namespace

PointSet::PointSet(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), values_(rows * dim, 0.0) {}

PointSet::PointSet(std::size_t rows, std::size_t dim, std::vector<double> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (values_.size() != rows_ * dim_)
    throw InputError("point buffer size does not match rows * dim");
}

PointSet PointSet::from_vectors(std::span<const FeatureVector> vectors) {
  if (vectors.empty())
    return {};
  const std::size_t dim = vectors.front().values.size();
  std::vector<double> flat;
  flat.reserve(vectors.size() * dim);
  for (const auto &v : vectors) {
    if (v.values.size() != dim)
      throw InputError("feature vectors have inconsistent dimensions");
    flat.insert(flat.end(), v.values.begin(), v.values.end());
  }
  return {vectors.size(), dim, std::move(flat)};
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>> &rows) {
  if (rows.empty())
    return {};
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * dim);
  for (const auto &r : rows) {
    if (r.size() != dim)
      throw InputError("rows have inconsistent dimensions");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return {rows.size(), dim, std::move(flat)};
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

std::vector<Neighbor> knn(const PointSet &points, std::span<const double> query, std::size_t k,
                          std::optional<std::size_t> exclude) {
  const std::size_t available =
      points.rows() - (exclude && *exclude < points.rows() ? 1 : 0);
  if (k == 0 || k > available)
    throw InsufficientPointsError("need " + std::to_string(k) + " neighbours but only " +
                                  std::to_string(available) + " points are available");
  if (query.size() != points.dim())
    throw InputError("query has dimension " + std::to_string(query.size()) + ", expected " +
                     std::to_string(points.dim()));

  std::vector<Neighbor> all;
  all.reserve(points.rows());
  select_nearest(points, query, k, exclude, all);
  all.resize(k);
  return all;
}

void LofParams::validate() const {
  if (min_pts < 1)
    throw ConfigError("min_pts must be >= 1");
  if (!(zero_dist_floor > 0.0) || !std::isfinite(zero_dist_floor))
    throw ConfigError("zero_dist_floor must be a positive finite value");
}

FeatureScaling FeatureScaling::fit(const PointSet &points) {
  FeatureScaling s;
  const std::size_t d = points.dim();
  s.offset.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  if (points.empty())
    return s;
  for (std::size_t f = 0; f < d; ++f) {
    double lo = points.row(0)[f];
    double hi = lo;
    for (std::size_t i = 1; i < points.rows(); ++i) {
      lo = std::min(lo, points.row(i)[f]);
      hi = std::max(hi, points.row(i)[f]);
    }
    s.offset[f] = lo;
    s.scale[f] = hi > lo ? 1.0 / (hi - lo) : 1.0;
  }
  return s;
}

void FeatureScaling::apply(std::span<double> values) const noexcept {
  for (std::size_t f = 0; f < offset.size() && f < values.size(); ++f)
    values[f] = (values[f] - offset[f]) * scale[f];
}

LofModel::LofModel(PointSet points, std::vector<double> k_dist, std::vector<double> lrd,
                   std::vector<std::uint16_t> neighbors, LofParams params, FeatureScaling scaling)
    : points_(std::move(points)), k_dist_(std::move(k_dist)), lrd_(std::move(lrd)),
      neighbors_(std::move(neighbors)), params_(params), scaling_(std::move(scaling)) {
  params_.validate();
  const std::size_t m = points_.rows();
  if (m <= params_.min_pts)
    throw InsufficientPointsError("model needs more points than min_pts");
  if (k_dist_.size() != m || lrd_.size() != m || neighbors_.size() != m * params_.min_pts)
    throw InputError("model arrays do not match the point count");
  if (!scaling_.empty() &&
      (scaling_.offset.size() != dim() || scaling_.scale.size() != dim()))
    throw InputError("feature scaling does not match the model dimension");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(k_dist_[i] > 0.0) || !std::isfinite(k_dist_[i]))
      throw InputError("k-distance must be positive and finite");
    if (!(lrd_[i] > 0.0) || !std::isfinite(lrd_[i]))
      throw InputError("local reachability density must be positive and finite");
    for (auto j : neighbors_of(i))
      if (j == i || j >= m)
        throw InputError("invalid neighbour index in model");
  }
  check_finite(points_.values(), "model points");
}

std::uint64_t LofModel::fingerprint() const noexcept {
  Fingerprint fp;
  fp.add(points_.rows());
  fp.add(points_.dim());
  fp.add_range(points_.values());
  fp.add_range(std::span<const double>(k_dist_));
  fp.add_range(std::span<const double>(lrd_));
  fp.add_range(std::span<const std::uint16_t>(neighbors_));
  fp.add(params_.min_pts);
  fp.add(params_.zero_dist_floor);
  fp.add_range(std::span<const double>(scaling_.offset));
  fp.add_range(std::span<const double>(scaling_.scale));
  return fp.value();
}

LofModel train(const PointSet &input, const LofParams &params) {
  params.validate();
  const std::size_t m = input.rows();
  const std::size_t k = params.min_pts;
  if (m <= k)
    throw InsufficientPointsError("training needs more than " + std::to_string(k) +
                                  " points, got " + std::to_string(m));
  if (m > kMaxModelPoints)
    throw InputError("training set exceeds " + std::to_string(kMaxModelPoints) + " points");
  check_finite(input.values(), "training set");

  LofModel model;
  model.params_ = params;
  model.points_ = input;
  if (params.normalize) {
    model.scaling_ = FeatureScaling::fit(input);
    for (std::size_t i = 0; i < m; ++i)
      model.scaling_.apply(model.points_.row(i));
  }
  const PointSet &pts = model.points_;
  const double eps = params.zero_dist_floor;

  model.k_dist_.resize(m);
  model.lrd_.resize(m);
  model.neighbors_.resize(m * k);
  std::vector<double> neighbor_dist(m * k);
  std::vector<Neighbor> nbrs;
  nbrs.reserve(m);

  for (std::size_t i = 0; i < m; ++i) {
    select_nearest(pts, pts.row(i), k, i, nbrs);
    for (std::size_t r = 0; r < k; ++r) {
      model.neighbors_[i * k + r] = static_cast<std::uint16_t>(nbrs[r].index);
      neighbor_dist[i * k + r] = nbrs[r].distance;
    }
    model.k_dist_[i] = std::max(nbrs[k - 1].distance, eps);
  }

  for (std::size_t i = 0; i < m; ++i) {
    double reach_sum = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = model.neighbors_[i * k + r];
      reach_sum += std::max(model.k_dist_[j], neighbor_dist[i * k + r]);
    }
    model.lrd_[i] = std::min(static_cast<double>(k) / reach_sum, 1.0 / eps);
  }
  return model;
}

double score(const LofModel &model, std::span<const double> query) {
  if (query.size() != model.dim())
    throw InputError("query has dimension " + std::to_string(query.size()) + ", model expects " +
                     std::to_string(model.dim()));
  check_finite(query, "query");

  std::vector<double> scaled;
  if (!model.scaling().empty()) {
    scaled.assign(query.begin(), query.end());
    model.scaling().apply(scaled);
    query = scaled;
  }

  const std::size_t k = model.min_pts();
  const double eps = model.params().zero_dist_floor;
  // Only sums over the neighbour set are needed, so rank order is skipped.
  thread_local std::vector<Neighbor> nbrs;
  select_nearest(model.points(), query, k, std::nullopt, nbrs, false);
  const auto k_dist = model.k_dist();
  const auto lrd = model.lrd();

  double reach_sum = 0.0;
  double lrd_sum = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const Neighbor &n = nbrs[r];
    reach_sum += std::max(std::max(k_dist[n.index], n.distance), eps);
    lrd_sum += lrd[n.index];
  }
  const double query_lrd = static_cast<double>(k) / reach_sum;
  const double ratio_sum = lrd_sum / query_lrd;
  return ratio_sum / static_cast<double>(k);
}

} // namespace tinylof
