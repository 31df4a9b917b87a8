#include "oracle/oracles.hpp"
#include "support/c_harness.hpp"
#include "tinylof/bench.hpp"
#include "tinylof/codegen.hpp"
#include "tinylof/csv.hpp"
#include "tinylof/dsp.hpp"
#include "tinylof/lof.hpp"
#include "tinylof/model_io.hpp"
#include "tinylof/synth.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace tinylof;

namespace {

int cli(const std::string &args, const fs::path &log = {}) {
  std::string cmd = std::string("\"") + TINYLOF_CLI_PATH + "\" " + args;
  cmd += log.empty() ? " >/dev/null 2>&1" : " >\"" + log.string() + "\" 2>&1";
  return harness::run(cmd);
}

std::string q(const fs::path &p) { return "\"" + p.string() + "\""; }

std::vector<CsvRow> read_rows(const fs::path &p) {
  std::ifstream in(p);
  return read_samples_csv(in);
}

std::vector<std::vector<std::string>> read_trace(const fs::path &p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "window_end,phase,event,score,is_anomaly");
  std::vector<std::vector<std::string>> out;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ','))
      f.push_back(item);
    if (!line.empty() && line.back() == ',')
      f.emplace_back();
    out.push_back(f);
  }
  return out;
}

const char *kFanConfig = R"({"window_len": 64, "stride": 32, "channels": 3, "fft_peaks": 1,
  "reservoir_capacity": 100, "min_pts": 10, "threshold": 2.0, "seed": 7})";

// Training prefix from regime 1 followed by the synthetic 60 s file in detect mode.
fs::path write_fan_replay(const fs::path &dir, std::size_t train_rows, std::size_t *detect_rows) {
  const auto profile = synth_profile("fan");
  const auto train = synth_regime(profile, 1, train_rows, 11);
  const fs::path synth = dir / "fan.csv";
  REQUIRE(cli("synth --profile fan --duration 60 --seed 3 --out " + q(synth)) == 0);
  const auto rows = read_rows(synth);
  *detect_rows = rows.size();

  const fs::path path = dir / "replay.csv";
  std::ofstream out(path);
  out << "t,ch1,ch2,ch3,regime,control\n";
  char buf[160];
  for (std::size_t i = 0; i < train.samples.size(); ++i) {
    const auto &c = train.samples[i].channels;
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,speed1,%s\n", i, c[0], c[1], c[2],
                  i == 0 ? "train" : "");
    out << buf;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &c = rows[i].sample.channels;
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%s,%s\n", train_rows + i, c[0], c[1],
                  c[2], rows[i].regime.c_str(), i == 0 ? "detect" : "");
    out << buf;
  }
  return path;
}

} // namespace

TEST_CASE("synth: deterministic, 6000 rows in four segments") {
  const auto dir = harness::scratch_dir("cli_synth");
  REQUIRE(cli("synth --profile fan --duration 60 --seed 5 --out " + q(dir / "a.csv")) == 0);
  REQUIRE(cli("synth --profile fan --duration 60 --seed 5 --out " + q(dir / "b.csv")) == 0);
  REQUIRE(cli("synth --profile fan --duration 60 --seed 6 --out " + q(dir / "c.csv")) == 0);
  CHECK(harness::read_text(dir / "a.csv") == harness::read_text(dir / "b.csv"));
  CHECK(harness::read_text(dir / "a.csv") != harness::read_text(dir / "c.csv"));

  const auto rows = read_rows(dir / "a.csv");
  CHECK(rows.size() == 6000);
  std::vector<std::string> segments;
  for (const auto &r : rows)
    if (segments.empty() || segments.back() != r.regime)
      segments.push_back(r.regime);
  CHECK(segments == std::vector<std::string>{"off", "speed1", "speed2", "speed3"});
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].sample.t == i);

  CHECK(cli("synth --profile toaster --out " + q(dir / "x.csv")) != 0);
}

TEST_CASE("synth: dominant FFT bin differs between running regimes") {
  const auto dir = harness::scratch_dir("cli_spectrum");
  REQUIRE(cli("synth --profile fan --duration 60 --seed 9 --out " + q(dir / "s.csv")) == 0);
  const auto rows = read_rows(dir / "s.csv");
  std::map<std::string, std::vector<double>> ch1;
  for (const auto &r : rows)
    ch1[r.regime].push_back(r.sample.channels[0]);
  auto dominant = [&](const std::string &regime) {
    const auto &x = ch1.at(regime);
    const std::size_t mid = x.size() / 2;
    const auto mags = oracle::dft_magnitudes(std::vector<double>(x.begin() + mid, x.begin() + mid + 64));
    return std::max_element(mags.begin(), mags.end()) - mags.begin();
  };
  const auto b1 = dominant("speed1"), b2 = dominant("speed2"), b3 = dominant("speed3");
  CHECK(b1 != b2);
  CHECK(b2 != b3);
  CHECK(b1 != b3);
}

TEST_CASE("stream: empty input gives an empty trace") {
  const auto dir = harness::scratch_dir("cli_empty");
  harness::write_text(dir / "in.csv", "");
  REQUIRE(cli("stream " + q(dir / "in.csv") + " --out " + q(dir / "trace.csv")) == 0);
  CHECK(read_trace(dir / "trace.csv").empty());
}

TEST_CASE("stream: errors map to exit codes and name the row") {
  const auto dir = harness::scratch_dir("cli_errors");
  harness::write_text(dir / "cfg.json", R"({"channels": 2, "window_len": 4, "stride": 4,
    "fft_peaks": 0, "features": "min,max", "min_pts": 2})");
  harness::write_text(dir / "bad.csv", "t,ch1,ch2\n0,1,2\n1,1,2\n2,3\n");
  const auto log = dir / "log.txt";
  CHECK(cli("stream " + q(dir / "bad.csv") + " --config " + q(dir / "cfg.json") + " --out " +
                q(dir / "t.csv"),
            log) == 2);
  CHECK(harness::read_text(log).find("line 4") != std::string::npos);

  harness::write_text(dir / "mono.csv", "t,ch1\n0,1\n");
  CHECK(cli("stream " + q(dir / "mono.csv") + " --config " + q(dir / "cfg.json") + " --out " +
                q(dir / "t.csv"),
            log) == 2);
  CHECK(harness::read_text(log).find("line 1") != std::string::npos);

  // Detect with nothing enrolled.
  harness::write_text(dir / "early.csv", "t,ch1,ch2,control\n0,1,2,\n1,1,2,detect\n");
  CHECK(cli("stream " + q(dir / "early.csv") + " --config " + q(dir / "cfg.json") + " --out " +
                q(dir / "t.csv"),
            log) == 2);
  CHECK(harness::read_text(log).find("line 3") != std::string::npos);

  harness::write_text(dir / "bad.json", R"({"window_len": 48})");
  CHECK(cli("stream " + q(dir / "mono.csv") + " --config " + q(dir / "bad.json") + " --out " +
            q(dir / "t.csv")) == 3);
  CHECK(cli("stream " + q(dir / "missing.csv") + " --out " + q(dir / "t.csv")) == 2);
  CHECK(cli("stream --bogus") == 3);
}

TEST_CASE("stream: fan replay is deterministic, complete and ordered") {
  const auto dir = harness::scratch_dir("cli_fan");
  harness::write_text(dir / "cfg.json", kFanConfig);
  const std::size_t train_rows = 1500;
  std::size_t detect_rows = 0;
  const auto input = write_fan_replay(dir, train_rows, &detect_rows);
  const std::string base = "stream " + q(input) + " --config " + q(dir / "cfg.json") + " --out ";
  REQUIRE(cli(base + q(dir / "t1.csv") + " --model-out " + q(dir / "m.bin")) == 0);
  REQUIRE(cli(base + q(dir / "t2.csv")) == 0);
  CHECK(harness::read_text(dir / "t1.csv") == harness::read_text(dir / "t2.csv"));

  const auto trace = read_trace(dir / "t1.csv");
  std::size_t sampled = 0, scored = 0;
  std::map<std::string, std::pair<double, int>> by_regime;
  const auto rows = read_rows(input);
  for (const auto &rec : trace) {
    REQUIRE(rec.size() == 5);
    if (rec[2] == "sampled") {
      ++sampled;
      CHECK(rec[1] == "train");
    }
    if (rec[2] != "scored")
      continue;
    ++scored;
    CHECK(rec[1] == "detect");
    const double s = std::stod(rec[3]);
    CHECK(rec[4] == (s > 2.0 ? "1" : "0"));
    // Attribute a window only if all of its samples share one regime.
    const std::size_t end = std::stoul(rec[0]);
    const auto &first = rows[end - 63].regime;
    if (rows[end].regime == first && end - 63 >= train_rows) {
      by_regime[first].first += s;
      by_regime[first].second += 1;
    }
  }
  CHECK(sampled == oracle::window_count(train_rows, 64, 32));
  CHECK(scored == oracle::window_count(detect_rows, 64, 32));

  auto mean = [&](const std::string &r) { return by_regime[r].first / by_regime[r].second; };
  CHECK(mean("speed1") < 2.0);
  CHECK(mean("off") > 2.0);
  CHECK(mean("speed2") > 2.0);
  CHECK(mean("speed3") > 2.0);

  // Saved model is the enrolled reservoir.
  const auto model = load_model(dir / "m.bin");
  CHECK(model.size() == std::min<std::size_t>(100, sampled));
  CHECK(model.dim() == 18);
}

TEST_CASE("stream: retrain directive emits a record") {
  const auto dir = harness::scratch_dir("cli_retrain");
  harness::write_text(dir / "cfg.json", R"({"channels": 1, "window_len": 4, "stride": 4,
    "fft_peaks": 0, "features": "min,max,std,rms", "min_pts": 2})");
  std::ostringstream csv;
  csv << "t,ch1,control\n";
  for (int i = 0; i < 40; ++i)
    csv << i << ',' << (i % 5) << ',' << (i == 24 ? "retrain" : i == 32 ? "detect" : "") << '\n';
  harness::write_text(dir / "in.csv", csv.str());
  REQUIRE(cli("stream " + q(dir / "in.csv") + " --config " + q(dir / "cfg.json") + " --out " +
              q(dir / "t.csv")) == 0);
  const auto trace = read_trace(dir / "t.csv");
  std::vector<std::string> kinds;
  for (const auto &r : trace)
    kinds.push_back(r[2]);
  CHECK(kinds == std::vector<std::string>{"sampled", "sampled", "sampled", "sampled", "sampled",
                                          "sampled", "retrained", "sampled", "sampled",
                                          "scored", "scored"});
  CHECK(trace[6][0] == "24");
}

TEST_CASE("bench: report shape and degenerate size") {
  const auto dir = harness::scratch_dir("cli_bench");
  REQUIRE(cli("bench --sizes 1,2,12 --reps 2 --queries 5 --out " + q(dir / "b.json")) == 0);
  const auto doc = nlohmann::json::parse(harness::read_text(dir / "b.json"));
  REQUIRE(doc.is_array());
  CHECK(doc.size() == 6);
  for (const auto &e : doc) {
    CHECK(e.contains("size"));
    CHECK(e.contains("op"));
    CHECK(e.contains("median_ns"));
    CHECK(e["samples"].is_array());
    if (e["size"] != 1)
      CHECK(e["samples"].size() == 2);
  }
  CHECK(cli("bench --sizes 50,25") == 3);
  CHECK(cli("bench --sizes 10,x") == 3);
}

TEST_CASE("fit_exponent recovers exact power laws") {
  const std::vector<double> sizes{25, 50, 100, 200};
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    std::vector<double> times;
    for (double m : sizes)
      times.push_back(7.0 * std::pow(m, p));
    CHECK(fit_exponent(sizes, times) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS(fit_exponent(std::vector<double>{10}, std::vector<double>{1}));

  std::vector<BenchEntry> entries{{1, "train", 0, {}, "skipped"},
                                  {10, "train", 100, {100}, ""},
                                  {20, "train", 400, {400}, ""},
                                  {10, "score", 5, {5}, ""}};
  CHECK(fit_exponent(entries, "train") == doctest::Approx(2.0));
}

TEST_CASE("run_bench reports every size and op") {
  BenchOptions opts;
  opts.sizes = {1, 4, 8};
  opts.repetitions = 3;
  opts.queries = 4;
  opts.dim = 3;
  const auto entries = run_bench(opts);
  REQUIRE(entries.size() == 6);
  CHECK(entries[0].op == "train");
  CHECK(entries[1].op == "score");
  CHECK_FALSE(entries[0].note.empty());
  CHECK(entries[0].samples_ns.empty());
  for (std::size_t i = 2; i < 6; ++i) {
    CHECK(entries[i].samples_ns.size() == 3);
    CHECK(entries[i].median_ns > 0.0);
  }
  const auto doc = nlohmann::json::parse(bench_to_json(entries));
  CHECK(doc.size() == 6);
  CHECK(doc[2]["samples"].size() == 3);
}

TEST_CASE("emit: trained model round-trips through generated C") {
  const auto dir = harness::scratch_dir("cli_emit");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  PointSet pts(40, 4);
  for (std::size_t i = 0; i < 40; ++i)
    for (auto &v : pts.row(i))
      v = g(rng);
  const auto model = train(pts, LofParams{6, 1e-9, false});
  save_model(model, dir / "m.bin");

  REQUIRE(cli("emit --model " + q(dir / "m.bin") + " --prefix fan --out " + q(dir / "gen")) == 0);
  CHECK(fs::exists(dir / "gen" / "fan_lof_model.h"));
  CHECK(fs::exists(dir / "gen" / "fan_manifest.txt"));
  const EmittedSources emitted{"fan_lof_model.h",
                               harness::read_text(dir / "gen" / "fan_lof_model.h"),
                               "fan_lof_model.c",
                               harness::read_text(dir / "gen" / "fan_lof_model.c")};
  const auto loaded = load_model(dir / "m.bin");
  CHECK(emitted.source == emit_c_model(loaded, {}, EmitOptions{"fan", 32, false, ""}).source);

  if (harness::have_c_compiler()) {
    harness::CompiledModel compiled(emitted, "cli_emit");
    std::vector<std::vector<double>> queries(30, std::vector<double>(4));
    for (auto &row : queries)
      for (auto &v : row)
        v = g(rng);
    const auto got = compiled.call("score", queries);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const double ref = score(model, queries[i]);
      CHECK(std::abs(got[i][0] - ref) <= 1e-5 * std::max(1.0, std::abs(ref)));
    }
  }

  auto bytes = harness::read_text(dir / "m.bin");
  harness::write_text(dir / "cut.bin", bytes.substr(0, bytes.size() / 2));
  const auto log = dir / "log.txt";
  CHECK(cli("emit --model " + q(dir / "cut.bin") + " --out " + q(dir / "gen2"), log) == 2);
  CHECK(harness::read_text(log).find("format error") != std::string::npos);
  CHECK(cli("emit --model " + q(dir / "m.bin") + " --prefix 9x --out " + q(dir / "gen3")) == 3);
}

TEST_CASE("footprint prints the budget") {
  const auto dir = harness::scratch_dir("cli_footprint");
  REQUIRE(cli("footprint", dir / "out.txt") == 0);
  CHECK(harness::read_text(dir / "out.txt").find("total: ") != std::string::npos);
}
