// tinylof command-line harness: synthetic data, replay, benchmark, codegen.

#include "tinylof/bench.hpp"
#include "tinylof/codegen.hpp"
#include "tinylof/config.hpp"
#include "tinylof/csv.hpp"
#include "tinylof/error.hpp"
#include "tinylof/model_io.hpp"
#include "tinylof/pipeline.hpp"
#include "tinylof/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace tinylof;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw InputError("cannot open '" + path + "' for writing");
  return out;
}

void write_file(const fs::path &path, const std::string &text) {
  auto out = open_out(path.string());
  out << text;
}

struct StreamArgs {
  std::string input;
  std::string config;
  std::string out;
  std::string model_out;
  std::optional<std::uint64_t> seed;
};

int cmd_stream(const StreamArgs &a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  if (a.seed)
    cfg.seed = *a.seed;
  cfg.validate();

  std::ifstream in(a.input);
  if (!in)
    throw InputError("cannot open input '" + a.input + "'");
  const auto rows = read_samples_csv(in, cfg.dsp.channels);

  Pipeline pipe(cfg);
  auto trace = open_out(a.out);
  write_trace_header(trace);

  for (const auto &row : rows) {
    try {
      switch (row.control) {
      case Control::Train:
        pipe.set_phase(Phase::Training);
        break;
      case Control::Detect:
        pipe.set_phase(Phase::Detecting, true);
        break;
      case Control::Retrain: {
        const PipelineEvent ev = pipe.train_now();
        write_trace_record(trace, *trace_record(ev, pipe.phase(), row.sample.t));
        break;
      }
      case Control::None:
        break;
      }
      const auto ev = pipe.step(row.sample);
      if (auto rec = trace_record(ev, pipe.phase(), row.sample.t))
        write_trace_record(trace, *rec);
    } catch (const ConfigError &) {
      throw;
    } catch (const Error &e) {
      throw InputError("line " + std::to_string(row.line) + ": " + e.what());
    }
  }

  if (!a.model_out.empty()) {
    if (!pipe.model())
      pipe.train_now();
    save_model(*pipe.model(), a.model_out);
  }
  std::cerr << "processed " << rows.size() << " samples: " << pipe.vectors_sampled()
            << " sampled, " << pipe.vectors_scored() << " scored, " << pipe.retrain_count()
            << " trainings\n";
  return kExitOk;
}

struct BenchArgs {
  std::string config;
  std::string sizes = "25,50,100,200";
  std::size_t reps = 15;
  std::size_t queries = 200;
  std::string out;
  std::optional<std::uint64_t> seed;
};

std::vector<std::size_t> parse_sizes(const std::string &list) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception &) {
      throw ConfigError("bad size '" + item + "' in --sizes");
    }
    if (pos != item.size())
      throw ConfigError("bad size '" + item + "' in --sizes");
    if (!sizes.empty() && v <= sizes.back())
      throw ConfigError("--sizes must be strictly ascending");
    sizes.push_back(v);
  }
  if (sizes.empty())
    throw ConfigError("--sizes is empty");
  return sizes;
}

int cmd_bench(const BenchArgs &a) {
  const PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : load_config(a.config);
  BenchOptions opts;
  opts.sizes = parse_sizes(a.sizes);
  opts.repetitions = a.reps;
  opts.queries = a.queries;
  opts.dim = cfg.dsp.feature_dim();
  opts.min_pts = cfg.lof.min_pts;
  opts.seed = a.seed.value_or(cfg.seed);
  if (opts.repetitions == 0 || opts.queries == 0)
    throw ConfigError("--reps and --queries must be positive");

  const auto entries = run_bench(opts);
  const auto json = bench_to_json(entries);
  if (a.out.empty())
    std::cout << json;
  else
    write_file(a.out, json);

  std::size_t trainable = 0;
  for (const auto &e : entries)
    trainable += (e.op == "train" && !e.samples_ns.empty()) ? 1 : 0;
  if (trainable >= 2) {
    std::cerr << "train exponent " << fit_exponent(entries, "train") << ", score exponent "
              << fit_exponent(entries, "score") << "\n";
  }
  return kExitOk;
}

struct SynthArgs {
  std::string profile = "fan";
  double duration = 60.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_synth(const SynthArgs &a) {
  const auto profile = synth_profile(a.profile);
  const auto stream = synth_generate(profile, a.duration, a.seed);
  auto out = open_out(a.out);
  write_synth_csv(out, stream);
  return kExitOk;
}

struct EmitArgs {
  std::string model;
  std::string config;
  std::string out_dir = ".";
  std::string prefix = "tinylof";
  std::string banner;
  bool include_dsp = false;
};

int cmd_emit(const EmitArgs &a) {
  EmitOptions opts;
  opts.symbol_prefix = a.prefix;
  opts.include_dsp = a.include_dsp;
  opts.banner = a.banner;
  if (!is_valid_symbol_prefix(opts.symbol_prefix))
    throw ConfigError("invalid symbol prefix '" + a.prefix + "'");
  std::optional<DspConfig> dsp;
  if (!a.config.empty())
    dsp = load_config(a.config).dsp;
  if (a.include_dsp && !dsp)
    throw ConfigError("--dsp needs --config");

  const LofModel model = load_model(a.model);
  const auto files = emit_c_model(model, dsp, opts);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  write_file(dir / files.header_name, files.header);
  write_file(dir / files.source_name, files.source);
  write_file(dir / (a.prefix + "_manifest.txt"), emit_manifest(model, dsp, opts));
  std::cerr << "wrote " << (dir / files.source_name).string() << "\n";
  return kExitOk;
}

int cmd_footprint(const std::string &config) {
  const PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_config(config);
  const auto f = memory_footprint(cfg);
  std::cout << "window: " << f.window << "\nreservoir: " << f.reservoir
            << "\nmodel: " << f.model() << "\n  header: " << f.model_header
            << "\n  points: " << f.model_points << "\n  k_dist: " << f.model_k_dist
            << "\n  lrd: " << f.model_lrd << "\n  neighbors: " << f.model_neighbors
            << "\n  scaling: " << f.model_scaling << "\ntotal: " << f.total() << "\n";
  return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"tinylof: streaming LOF anomaly detection toolkit"};
  app.require_subcommand(1);

  StreamArgs stream_args;
  auto *stream = app.add_subcommand("stream", "Replay a CSV time series through the pipeline");
  stream->add_option("input", stream_args.input, "Input CSV (t,ch1..chC[,regime][,control])")
      ->required();
  stream->add_option("--config", stream_args.config, "Pipeline config (JSON)");
  stream->add_option("--out", stream_args.out, "Trace CSV output")->required();
  stream->add_option("--model-out", stream_args.model_out, "Save the final model here");
  stream->add_option("--seed", stream_args.seed, "Override the config seed");

  BenchArgs bench_args;
  auto *bench = app.add_subcommand("bench", "Time training and scoring against reservoir size");
  bench->add_option("--config", bench_args.config, "Pipeline config (dimension, min_pts)");
  bench->add_option("--sizes", bench_args.sizes, "Ascending reservoir sizes, e.g. 25,50,100");
  bench->add_option("--reps", bench_args.reps, "Repetitions per size");
  bench->add_option("--queries", bench_args.queries, "Queries per score repetition");
  bench->add_option("--out", bench_args.out, "JSON report path (default stdout)");
  bench->add_option("--seed", bench_args.seed, "RNG seed");

  SynthArgs synth_args;
  auto *synth = app.add_subcommand("synth", "Generate a synthetic multi-regime CSV");
  synth->add_option("--profile", synth_args.profile, "Profile name (fan)");
  synth->add_option("--duration", synth_args.duration, "Seconds of data");
  synth->add_option("--seed", synth_args.seed, "RNG seed");
  synth->add_option("--out", synth_args.out, "Output CSV")->required();

  EmitArgs emit_args;
  auto *emit = app.add_subcommand("emit", "Generate C source for a trained model");
  emit->add_option("--model", emit_args.model, "Model file")->required();
  emit->add_option("--config", emit_args.config, "Pipeline config supplying the DSP layout");
  emit->add_option("--out", emit_args.out_dir, "Output directory");
  emit->add_option("--prefix", emit_args.prefix, "C symbol prefix");
  emit->add_option("--banner", emit_args.banner, "Text for the file comment");
  emit->add_flag("--dsp", emit_args.include_dsp, "Also emit the feature extractor");

  std::string footprint_config;
  auto *footprint = app.add_subcommand("footprint", "Print the worst-case memory budget");
  footprint->add_option("--config", footprint_config, "Pipeline config (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (stream->parsed())
      return cmd_stream(stream_args);
    if (bench->parsed())
      return cmd_bench(bench_args);
    if (synth->parsed())
      return cmd_synth(synth_args);
    if (emit->parsed())
      return cmd_emit(emit_args);
    if (footprint->parsed())
      return cmd_footprint(footprint_config);
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError &e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error &e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
