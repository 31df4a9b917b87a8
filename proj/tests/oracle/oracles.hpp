#pragma once
// Brute-force reference implementations used only by tests. They follow the
// textbook definitions directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double dist(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// Indices of all rows except `skip`, ordered by distance then index.
inline std::vector<std::size_t> ranked(const Matrix &pts, const std::vector<double> &q,
                                       long skip) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (static_cast<long>(j) != skip)
      idx.push_back(j);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return dist(pts[a], q) < dist(pts[b], q);
  });
  return idx;
}

struct Lof {
  Matrix pts;
  std::size_t k;
  double eps;
  std::vector<std::vector<std::size_t>> nbrs;
  std::vector<double> k_dist;
  std::vector<double> lrd;

  Lof(Matrix points, std::size_t min_pts, double floor)
      : pts(std::move(points)), k(min_pts), eps(floor) {
    const std::size_t m = pts.size();
    // Full distance matrix, as the definitions are written.
    Matrix dm(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        dm[i][j] = dist(pts[i], pts[j]);
    for (std::size_t i = 0; i < m; ++i) {
      auto r = ranked(pts, pts[i], static_cast<long>(i));
      r.resize(k);
      nbrs.push_back(r);
      k_dist.push_back(std::max(dm[i][r.back()], eps));
    }
    for (std::size_t i = 0; i < m; ++i) {
      double mean_reach = 0.0;
      for (auto j : nbrs[i])
        mean_reach += std::max(k_dist[j], dm[i][j]) / static_cast<double>(k);
      lrd.push_back(std::min(1.0 / mean_reach, 1.0 / eps));
    }
  }

  double score(const std::vector<double> &q) const {
    auto r = ranked(pts, q, -1);
    r.resize(k);
    double mean_reach = 0.0;
    double mean_lrd = 0.0;
    for (auto j : r) {
      mean_reach += std::max({k_dist[j], dist(q, pts[j]), eps}) / static_cast<double>(k);
      mean_lrd += lrd[j] / static_cast<double>(k);
    }
    const double lrd_q = 1.0 / mean_reach;
    return mean_lrd / lrd_q;
  }
};

/// Direct O(W^2) DFT magnitudes for bins 1..W/2.
inline std::vector<double> dft_magnitudes(const std::vector<double> &x) {
  const std::size_t n = x.size();
  std::vector<double> out;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) /
                           static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out.push_back(std::abs(acc));
  }
  return out;
}

/// Number of windows emitted for an n-sample stream by stepping a window
/// start through 0, S, 2S, ... while it still fits.
inline std::size_t window_count(std::size_t n, std::size_t w, std::size_t s) {
  std::size_t count = 0;
  for (std::size_t start = 0; start + w <= n; start += s)
    ++count;
  return count;
}

} // namespace oracle
