#include "tinylof/config.hpp"

#include "tinylof/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tinylof {

namespace {

using nlohmann::json;

std::size_t get_size(const json &v, const std::string &key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw ConfigError("'" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double get_number(const json &v, const std::string &key) {
  if (!v.is_number())
    throw ConfigError("'" + key + "' must be a number");
  return v.get<double>();
}

} // namespace

PipelineConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("config must be a JSON object");

  PipelineConfig cfg;
  for (const auto &[key, v] : doc.items()) {
    if (key == "window_len") {
      cfg.dsp.window_len = get_size(v, key);
    } else if (key == "stride") {
      cfg.dsp.stride = get_size(v, key);
    } else if (key == "channels") {
      cfg.dsp.channels = get_size(v, key);
    } else if (key == "fft_peaks") {
      cfg.dsp.fft_peaks = get_size(v, key);
    } else if (key == "features") {
      if (v.is_string()) {
        cfg.dsp.features = FeatureMask::parse(v.get<std::string>());
      } else if (v.is_array()) {
        std::string joined;
        for (const auto &item : v) {
          if (!item.is_string())
            throw ConfigError("'features' entries must be strings");
          joined += item.get<std::string>() + ",";
        }
        cfg.dsp.features = FeatureMask::parse(joined);
      } else {
        throw ConfigError("'features' must be a string or an array of strings");
      }
    } else if (key == "reservoir_capacity") {
      cfg.reservoir_capacity = get_size(v, key);
    } else if (key == "min_pts") {
      cfg.lof.min_pts = get_size(v, key);
    } else if (key == "zero_dist_floor") {
      cfg.lof.zero_dist_floor = get_number(v, key);
    } else if (key == "normalize") {
      if (!v.is_boolean())
        throw ConfigError("'normalize' must be a boolean");
      cfg.lof.normalize = v.get<bool>();
    } else if (key == "threshold") {
      cfg.threshold = get_number(v, key);
    } else if (key == "retrain_every") {
      const std::size_t n = v.is_null() ? 0 : get_size(v, key);
      cfg.retrain_every = n == 0 ? std::nullopt : std::optional<std::size_t>(n);
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError("'seed' must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const PipelineConfig &cfg) {
  json doc = {
      {"window_len", cfg.dsp.window_len},
      {"stride", cfg.dsp.stride},
      {"channels", cfg.dsp.channels},
      {"fft_peaks", cfg.dsp.fft_peaks},
      {"features", cfg.dsp.features.to_string()},
      {"reservoir_capacity", cfg.reservoir_capacity},
      {"min_pts", cfg.lof.min_pts},
      {"zero_dist_floor", cfg.lof.zero_dist_floor},
      {"normalize", cfg.lof.normalize},
      {"threshold", cfg.threshold},
      {"retrain_every", cfg.retrain_every ? json(*cfg.retrain_every) : json(nullptr)},
      {"seed", cfg.seed},
  };
  return doc.dump(2) + "\n";
}

} // namespace tinylof
