#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tinylof {

struct BenchOptions {
  std::vector<std::size_t> sizes = {25, 50, 100, 200};
  std::size_t repetitions = 15;
  std::size_t dim = 15;
  std::size_t min_pts = 10;
  /// Queries timed together per score repetition; reported per query.
  std::size_t queries = 200;
  std::uint64_t seed = 1;
};

struct BenchEntry {
  std::size_t size = 0;
  std::string op; // "train" or "score"
  double median_ns = 0.0;
  std::vector<double> samples_ns;
  /// Set when the size cannot be trained (m < 2).
  std::string note;
};

/// Times train() and score() on random reservoirs of each size with a
/// monotonic clock, sequentially. Each repetition trains once on freshly
/// drawn points and scores every query against that model; samples are per
/// call. min_pts is clamped to m - 1; sizes below 2 are reported with a note
/// and no samples.
std::vector<BenchEntry> run_bench(const BenchOptions &opts);

/// Least-squares slope of log(time) against log(size).
double fit_exponent(std::span<const double> sizes, std::span<const double> times);

/// Exponent for one op over the entries that carry samples.
double fit_exponent(const std::vector<BenchEntry> &entries, const std::string &op);

/// JSON array of {size, op, median_ns, samples[]} objects.
std::string bench_to_json(const std::vector<BenchEntry> &entries);

} // namespace tinylof
