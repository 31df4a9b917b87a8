#include "tinylof/bench.hpp"

#include "tinylof/error.hpp"
#include "tinylof/lof.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace tinylof {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

PointSet random_points(std::size_t m, std::size_t d, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss;
  PointSet pts(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (auto &v : pts.row(i))
      v = gauss(rng);
  return pts;
}

double elapsed_ns(Clock::time_point start) {
  return std::chrono::duration<double, std::nano>(Clock::now() - start).count();
}

} // namespace

std::vector<BenchEntry> run_bench(const BenchOptions &opts) {
  if (opts.repetitions == 0 || opts.dim == 0 || opts.queries == 0)
    throw ConfigError("bench needs positive repetitions, dim and queries");
  std::mt19937_64 rng(opts.seed);
  std::vector<BenchEntry> out;
  volatile double sink = 0.0;

  struct Case {
    std::size_t size = 0;
    LofParams params;
    std::size_t entry = 0; // index of the train entry in `out`
  };
  std::vector<Case> cases;
  for (std::size_t m : opts.sizes) {
    out.push_back(BenchEntry{m, "train", 0.0, {}, {}});
    out.push_back(BenchEntry{m, "score", 0.0, {}, {}});
    if (m < 2) {
      out[out.size() - 2].note = out.back().note = "skipped: training needs at least 2 points";
      continue;
    }
    Case c;
    c.size = m;
    c.params.min_pts = std::min(opts.min_pts, m - 1);
    c.entry = out.size() - 2;
    cases.push_back(c);
  }
  const PointSet queries = random_points(opts.queries, opts.dim, rng);

  // Every sample sees fresh points, so repeated identical work cannot be
  // memorised by the branch predictor; an untimed run on other fresh points
  // warms the code paths first.
  auto measure = [&](const Case &c, bool record) {
    const PointSet warm = random_points(c.size, opts.dim, rng);
    const PointSet pts = random_points(c.size, opts.dim, rng);
    sink = sink + score(train(warm, c.params), queries.row(0));
    auto start = Clock::now();
    const LofModel model = train(pts, c.params);
    const double train_ns = elapsed_ns(start);
    double acc = 0.0;
    start = Clock::now();
    for (std::size_t q = 0; q < queries.rows(); ++q)
      acc += score(model, queries.row(q));
    const double score_ns = elapsed_ns(start) / static_cast<double>(queries.rows());
    sink = sink + acc;
    if (record) {
      out[c.entry].samples_ns.push_back(train_ns);
      out[c.entry + 1].samples_ns.push_back(score_ns);
    }
  };

  // Untimed warm-up to bring the CPU out of idle.
  const auto warm_until = Clock::now() + std::chrono::milliseconds(100);
  while (!cases.empty() && Clock::now() < warm_until)
    for (const auto &c : cases)
      measure(c, false);

  // Repetitions are interleaved across sizes so slow drift hits every size.
  for (std::size_t r = 0; r < opts.repetitions; ++r)
    for (const auto &c : cases)
      measure(c, true);
  for (auto &e : out)
    if (!e.samples_ns.empty())
      e.median_ns = median(e.samples_ns);
  return out;
}

double fit_exponent(std::span<const double> sizes, std::span<const double> times) {
  const std::size_t n = sizes.size();
  if (n < 2 || times.size() != n)
    throw InputError("exponent fit needs at least two (size, time) pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(sizes[i]);
    const double y = std::log(times[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

double fit_exponent(const std::vector<BenchEntry> &entries, const std::string &op) {
  std::vector<double> sizes, times;
  for (const auto &e : entries) {
    if (e.op != op || e.samples_ns.empty())
      continue;
    sizes.push_back(static_cast<double>(e.size));
    times.push_back(e.median_ns);
  }
  return fit_exponent(sizes, times);
}

std::string bench_to_json(const std::vector<BenchEntry> &entries) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto &e : entries) {
    nlohmann::json item = {
        {"size", e.size}, {"op", e.op}, {"median_ns", e.median_ns}, {"samples", e.samples_ns}};
    if (!e.note.empty())
      item["note"] = e.note;
    doc.push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

} // namespace tinylof
