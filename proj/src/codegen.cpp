#include "tinylof/codegen.hpp"

#include "tinylof/error.hpp"
#include "tinylof/model_io.hpp"
#include "tinylof/pipeline.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace tinylof {

namespace {

// Shortest text that round-trips a float32, as a C float literal.
std::string float_literal(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(static_cast<float>(value)));
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos)
    s += ".0";
  return s + "f";
}

std::string upper(const std::string &s) {
  std::string out = s;
  for (auto &c : out)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string comment_safe(const std::string &text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '*' && i + 1 < text.size() && text[i + 1] == '/') {
      out += "* /";
      ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

void banner_comment(std::ostringstream &out, const EmitOptions &opts, const char *what) {
  out << "/*\n * " << what << "\n * Generated by tinylof. Do not edit.\n";
  if (!opts.banner.empty()) {
    std::istringstream lines(comment_safe(opts.banner));
    std::string line;
    out << " *\n";
    while (std::getline(lines, line))
      out << " * " << line << "\n";
  }
  out << " */\n";
}

template <typename Range, typename Fn>
void array_body(std::ostringstream &out, const Range &values, Fn &&render, std::size_t per_line) {
  std::size_t i = 0;
  for (const auto &v : values) {
    out << (i % per_line == 0 ? "    " : " ") << render(v) << ",";
    if (++i % per_line == 0)
      out << "\n";
  }
  if (i % per_line != 0)
    out << "\n";
}

void float_array(std::ostringstream &out, const std::string &decl,
                 std::span<const double> values) {
  out << decl << " = {\n";
  array_body(out, values, float_literal, 6);
  out << "};\n\n";
}

void emit_scorer(std::ostringstream &src, const LofModel &model, const std::string &p,
                 const std::string &P) {
  const bool scaled = !model.scaling().empty();
  src << "float " << p << "_lof_score(const float *features)\n{\n";
  src << "    float best_dist[" << P << "_MIN_PTS];\n";
  src << "    unsigned short best_idx[" << P << "_MIN_PTS];\n";
  if (scaled)
    src << "    float query[" << P << "_DIM];\n";
  else
    src << "    const float *query = features;\n";
  src << "    float reach_sum = 0.0f;\n"
         "    float ratio_sum = 0.0f;\n"
         "    float query_lrd;\n"
         "    int count = 0;\n"
         "    int i;\n"
         "    int f;\n"
         "    int r;\n\n";
  if (scaled) {
    src << "    for (f = 0; f < " << P << "_DIM; ++f)\n"
        << "        query[f] = (features[f] - " << p << "_offset[f]) * " << p << "_scale[f];\n\n";
  }
  src << "    for (i = 0; i < " << P << "_N_POINTS; ++i) {\n"
      << "        const float *row = &" << p << "_points[i * " << P << "_DIM];\n"
      << "        float acc = 0.0f;\n"
      << "        float dist;\n"
      << "        int pos;\n"
      << "        for (f = 0; f < " << P << "_DIM; ++f) {\n"
      << "            const float diff = row[f] - query[f];\n"
      << "            acc += diff * diff;\n"
      << "        }\n"
      << "        dist = sqrtf(acc);\n"
      << "        if (count == " << P << "_MIN_PTS && !(dist < best_dist[count - 1]))\n"
      << "            continue;\n"
      << "        pos = count < " << P << "_MIN_PTS ? count++ : count - 1;\n"
      << "        /* equal distances keep the lower index first */\n"
      << "        while (pos > 0 && best_dist[pos - 1] > dist) {\n"
      << "            best_dist[pos] = best_dist[pos - 1];\n"
      << "            best_idx[pos] = best_idx[pos - 1];\n"
      << "            --pos;\n"
      << "        }\n"
      << "        best_dist[pos] = dist;\n"
      << "        best_idx[pos] = (unsigned short)i;\n"
      << "    }\n\n";
  src << "    for (r = 0; r < " << P << "_MIN_PTS; ++r) {\n"
      << "        float reach = " << p << "_k_dist[best_idx[r]];\n"
      << "        if (best_dist[r] > reach)\n"
      << "            reach = best_dist[r];\n"
      << "        if (" << P << "_EPS > reach)\n"
      << "            reach = " << P << "_EPS;\n"
      << "        reach_sum += reach;\n"
      << "    }\n"
      << "    query_lrd = (float)" << P << "_MIN_PTS / reach_sum;\n"
      << "    for (r = 0; r < " << P << "_MIN_PTS; ++r)\n"
      << "        ratio_sum += " << p << "_lrd[best_idx[r]] / query_lrd;\n"
      << "    return ratio_sum / (float)" << P << "_MIN_PTS;\n"
      << "}\n";
}

void emit_extractor(std::ostringstream &src, const DspConfig &dsp, const std::string &p,
                    const std::string &P) {
  const std::size_t w = dsp.window_len;
  const std::size_t peaks = dsp.effective_peaks();

  if (peaks > 0) {
    std::vector<double> tw_re(w / 2), tw_im(w / 2);
    for (std::size_t k = 0; k < w / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(w);
      tw_re[k] = std::cos(angle);
      tw_im[k] = std::sin(angle);
    }
    std::vector<std::size_t> bitrev(w);
    for (std::size_t i = 0; i < w; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 1, rb = w >> 1; b < w; b <<= 1, rb >>= 1)
        if (i & b)
          r |= rb;
      bitrev[i] = r;
    }
    float_array(src, "static const float " + p + "_twiddle_re[" + P + "_WINDOW_LEN / 2]", tw_re);
    float_array(src, "static const float " + p + "_twiddle_im[" + P + "_WINDOW_LEN / 2]", tw_im);
    src << "static const unsigned short " << p << "_bitrev[" << P << "_WINDOW_LEN] = {\n";
    array_body(src, bitrev, [](std::size_t v) { return std::to_string(v) + "u"; }, 12);
    src << "};\n\n";
  }

  src << "void " << p << "_extract_features(const float *window, float *features)\n{\n";
  if (peaks > 0) {
    src << "    float re[" << P << "_WINDOW_LEN];\n"
        << "    float im[" << P << "_WINDOW_LEN];\n"
        << "    float spectrum[" << P << "_WINDOW_LEN / 2 + 1];\n";
  }
  src << "    int out = 0;\n"
         "    int c;\n"
         "    int i;\n\n";
  const bool min_max = dsp.features.has(Feature::Min) || dsp.features.has(Feature::Max);
  const bool spread = dsp.features.has(Feature::Std);
  const bool power = spread || dsp.features.has(Feature::Rms);
  src << "    for (c = 0; c < " << P << "_CHANNELS; ++c) {\n";
  if (min_max)
    src << "        float lo = window[c];\n"
        << "        float hi = window[c];\n";
  if (spread)
    src << "        float sum = 0.0f;\n";
  if (power)
    src << "        float sum_sq = 0.0f;\n";
  if (spread)
    src << "        float dev_sq = 0.0f;\n"
        << "        float mean;\n";
  if (min_max || power) {
    src << "        for (i = 0; i < " << P << "_WINDOW_LEN; ++i) {\n"
        << "            const float x = window[i * " << P << "_CHANNELS + c];\n";
    if (min_max)
      src << "            if (x < lo)\n"
          << "                lo = x;\n"
          << "            if (x > hi)\n"
          << "                hi = x;\n";
    if (spread)
      src << "            sum += x;\n";
    if (power)
      src << "            sum_sq += x * x;\n";
    src << "        }\n";
  }
  if (spread)
    src << "        mean = sum / (float)" << P << "_WINDOW_LEN;\n"
        << "        for (i = 0; i < " << P << "_WINDOW_LEN; ++i) {\n"
        << "            const float dev = window[i * " << P << "_CHANNELS + c] - mean;\n"
        << "            dev_sq += dev * dev;\n"
        << "        }\n";
  if (dsp.features.has(Feature::Min))
    src << "        features[out++] = lo;\n";
  if (dsp.features.has(Feature::Max))
    src << "        features[out++] = hi;\n";
  if (spread)
    src << "        features[out++] = sqrtf(dev_sq / (float)" << P << "_WINDOW_LEN);\n";
  if (dsp.features.has(Feature::Rms))
    src << "        features[out++] = sqrtf(sum_sq / (float)" << P << "_WINDOW_LEN);\n";
  if (min_max && !dsp.features.has(Feature::Min))
    src << "        (void)lo;\n";
  if (min_max && !dsp.features.has(Feature::Max))
    src << "        (void)hi;\n";

  if (peaks > 0) {
    src << "        {\n"
        << "            int len;\n"
        << "            int k;\n"
        << "            int pk;\n"
        << "            for (i = 0; i < " << P << "_WINDOW_LEN; ++i) {\n"
        << "                re[" << p << "_bitrev[i]] = window[i * " << P << "_CHANNELS + c];\n"
        << "                im[i] = 0.0f;\n"
        << "            }\n"
        << "            for (len = 2; len <= " << P << "_WINDOW_LEN; len <<= 1) {\n"
        << "                const int half = len / 2;\n"
        << "                const int step = " << P << "_WINDOW_LEN / len;\n"
        << "                for (k = 0; k < half; ++k) {\n"
        << "                    const float wr = " << p << "_twiddle_re[k * step];\n"
        << "                    const float wi = " << p << "_twiddle_im[k * step];\n"
        << "                    int start;\n"
        << "                    for (start = 0; start < " << P << "_WINDOW_LEN; start += len) {\n"
        << "                        const int a = start + k;\n"
        << "                        const int b = a + half;\n"
        << "                        const float vr = re[b] * wr - im[b] * wi;\n"
        << "                        const float vi = re[b] * wi + im[b] * wr;\n"
        << "                        re[b] = re[a] - vr;\n"
        << "                        im[b] = im[a] - vi;\n"
        << "                        re[a] += vr;\n"
        << "                        im[a] += vi;\n"
        << "                    }\n"
        << "                }\n"
        << "            }\n"
        << "            spectrum[0] = 0.0f; /* DC never counts as a peak */\n"
        << "            for (k = 1; k <= " << P << "_WINDOW_LEN / 2; ++k)\n"
        << "                spectrum[k] = sqrtf(re[k] * re[k] + im[k] * im[k]);\n"
        << "            for (pk = 0; pk < " << P << "_FFT_PEAKS; ++pk) {\n"
        << "                int best = 0;\n"
        << "                for (k = 1; k <= " << P << "_WINDOW_LEN / 2; ++k)\n"
        << "                    if (spectrum[k] > 0.0f && (best == 0 || spectrum[k] > spectrum[best]))\n"
        << "                        best = k;\n"
        << "                if (best == 0) {\n"
        << "                    features[out++] = 0.0f;\n"
        << "                    features[out++] = 0.0f;\n"
        << "                } else {\n"
        << "                    features[out++] = (float)best / (float)(" << P
        << "_WINDOW_LEN / 2);\n"
        << "                    features[out++] = spectrum[best];\n"
        << "                    spectrum[best] = -1.0f;\n"
        << "                }\n"
        << "            }\n"
        << "        }\n";
  }
  src << "    }\n"
      << "}\n";
}

} // namespace

bool is_valid_symbol_prefix(const std::string &prefix) {
  if (prefix.empty() || prefix.size() > 40)
    return false;
  const auto first = static_cast<unsigned char>(prefix.front());
  if (!std::isalpha(first) && first != '_')
    return false;
  for (char ch : prefix) {
    const auto c = static_cast<unsigned char>(ch);
    if (c > 0x7f || (!std::isalnum(c) && c != '_'))
      return false;
  }
  return true;
}

EmittedSources emit_c_model(const LofModel &model, const std::optional<DspConfig> &dsp,
                            const EmitOptions &opts) {
  if (!is_valid_symbol_prefix(opts.symbol_prefix))
    throw ConfigError("invalid symbol prefix '" + opts.symbol_prefix +
                      "': must be a C identifier of at most 40 characters");
  if (opts.float_bits != 32)
    throw ConfigError("only 32-bit float emission is supported");
  if (model.size() == 0)
    throw ConfigError("cannot emit an untrained model");
  if (opts.include_dsp) {
    if (!dsp)
      throw ConfigError("include_dsp needs a DSP configuration");
    dsp->validate();
    if (dsp->feature_dim() != model.dim())
      throw ConfigError("DSP feature dimension " + std::to_string(dsp->feature_dim()) +
                        " does not match model dimension " + std::to_string(model.dim()));
  }

  const std::string &p = opts.symbol_prefix;
  const std::string P = upper(p);
  EmittedSources out;
  out.header_name = p + "_lof_model.h";
  out.source_name = p + "_lof_model.c";

  std::ostringstream hdr;
  banner_comment(hdr, opts, "LOF novelty-detection model.");
  const std::string guard = P + "_LOF_MODEL_H";
  hdr << "#ifndef " << guard << "\n#define " << guard << "\n\n";
  hdr << "#define " << P << "_N_POINTS " << model.size() << "\n";
  hdr << "#define " << P << "_DIM " << model.dim() << "\n";
  hdr << "#define " << P << "_MIN_PTS " << model.min_pts() << "\n";
  hdr << "#define " << P << "_EPS " << float_literal(model.params().zero_dist_floor) << "\n";
  if (opts.include_dsp) {
    hdr << "#define " << P << "_WINDOW_LEN " << dsp->window_len << "\n";
    hdr << "#define " << P << "_CHANNELS " << dsp->channels << "\n";
    hdr << "#define " << P << "_FFT_PEAKS " << dsp->effective_peaks() << "\n";
  }
  hdr << "\n#ifdef __cplusplus\nextern \"C\" {\n#endif\n\n";
  hdr << "extern const float " << p << "_points[" << P << "_N_POINTS * " << P << "_DIM];\n";
  hdr << "extern const float " << p << "_k_dist[" << P << "_N_POINTS];\n";
  hdr << "extern const float " << p << "_lrd[" << P << "_N_POINTS];\n\n";
  hdr << "/* LOF score of one feature vector of " << P << "_DIM floats; above ~1 is unusual. */\n";
  hdr << "float " << p << "_lof_score(const float *features);\n";
  if (opts.include_dsp) {
    hdr << "\n/* window: " << P << "_WINDOW_LEN x " << P
        << "_CHANNELS floats, oldest sample first, channels interleaved.\n"
        << "   features: receives " << P << "_DIM floats. */\n";
    hdr << "void " << p << "_extract_features(const float *window, float *features);\n";
  }
  hdr << "\n#ifdef __cplusplus\n}\n#endif\n\n#endif /* " << guard << " */\n";
  out.header = hdr.str();

  std::ostringstream src;
  banner_comment(src, opts, "LOF novelty-detection model.");
  src << "#include \"" << out.header_name << "\"\n\n#include <math.h>\n\n";
  float_array(src, "const float " + p + "_points[" + P + "_N_POINTS * " + P + "_DIM]",
              model.points().values());
  float_array(src, "const float " + p + "_k_dist[" + P + "_N_POINTS]", model.k_dist());
  float_array(src, "const float " + p + "_lrd[" + P + "_N_POINTS]", model.lrd());
  if (!model.scaling().empty()) {
    float_array(src, "static const float " + p + "_offset[" + P + "_DIM]",
                model.scaling().offset);
    float_array(src, "static const float " + p + "_scale[" + P + "_DIM]", model.scaling().scale);
  }
  emit_scorer(src, model, p, P);
  if (opts.include_dsp) {
    src << "\n";
    emit_extractor(src, *dsp, p, P);
  }
  out.source = src.str();
  return out;
}

std::string emit_manifest(const LofModel &model, const std::optional<DspConfig> &dsp,
                          const EmitOptions &opts) {
  const auto mem = model_footprint(model);
  std::ostringstream out;
  out << "tinylof model manifest\n";
  out << "symbol_prefix: " << opts.symbol_prefix << "\n";
  out << "m: " << model.size() << "\n";
  out << "d: " << model.dim() << "\n";
  out << "min_pts: " << model.min_pts() << "\n";
  char eps[32];
  std::snprintf(eps, sizeof(eps), "%.9g", model.params().zero_dist_floor);
  out << "zero_dist_floor: " << eps << "\n";
  out << "feature_scaling: " << (model.scaling().empty() ? "off" : "min-max") << "\n";
  out << "memory_bytes: " << mem.model() << "\n";
  out << "  header: " << mem.model_header << "\n";
  out << "  points: " << mem.model_points << "\n";
  out << "  k_dist: " << mem.model_k_dist << "\n";
  out << "  lrd: " << mem.model_lrd << "\n";
  out << "  neighbors: " << mem.model_neighbors << "\n";
  out << "  scaling: " << mem.model_scaling << "\n";
  if (dsp) {
    out << "dsp: window_len=" << dsp->window_len << " stride=" << dsp->stride
        << " channels=" << dsp->channels << " fft_peaks=" << dsp->effective_peaks()
        << " features=" << dsp->features.to_string() << "\n";
  }

  std::vector<std::string> names;
  if (dsp && dsp->feature_dim() == model.dim())
    names = feature_layout(*dsp);
  else
    for (std::size_t f = 0; f < model.dim(); ++f)
      names.push_back("f" + std::to_string(f));
  out << "features:\n";
  for (std::size_t f = 0; f < names.size(); ++f)
    out << "  " << f << "\t" << names[f] << "\n";
  return out.str();
}

} // namespace tinylof
