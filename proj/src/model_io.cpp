#include "tinylof/model_io.hpp"

#include "tinylof/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace tinylof {

namespace {

constexpr char kMagic[4] = {'T', 'L', 'O', 'F'};
constexpr std::uint32_t kFlagScaling = 1u;

class Writer {
public:
  void raw(const char *data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      out_.push_back(static_cast<std::byte>(data[i]));
  }
  template <typename U> void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i)
      out_.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
  }
  void u32(std::uint32_t v) { uint(v); }
  void u16(std::uint16_t v) { uint(v); }
  void f32(double v) { uint(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

  std::vector<std::byte> take() { return std::move(out_); }

private:
  std::vector<std::byte> out_;
};

class Reader {
public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}

  void need(std::size_t n, const char *what) const {
    if (in_.size() - pos_ < n)
      throw FormatError(std::string("model file truncated while reading ") + what + " at byte " +
                        std::to_string(pos_));
  }
  template <typename U> U uint(const char *what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<U>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  std::uint32_t u32(const char *what) { return uint<std::uint32_t>(what); }
  std::uint16_t u16(const char *what) { return uint<std::uint16_t>(what); }
  double f32(const char *what) { return std::bit_cast<float>(u32(what)); }
  double f64(const char *what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }

  std::vector<double> f32_array(std::size_t n, const char *what) {
    need(n * 4, what);
    std::vector<double> out(n);
    for (auto &v : out)
      v = f32(what);
    return out;
  }

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t pos() const noexcept { return pos_; }

private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

} // namespace

std::vector<std::byte> serialize_model(const LofModel &model) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.size()));
  w.u32(static_cast<std::uint32_t>(model.dim()));
  w.u32(static_cast<std::uint32_t>(model.min_pts()));
  w.f64(model.params().zero_dist_floor);
  w.u32(model.scaling().empty() ? 0u : kFlagScaling);
  for (double v : model.points().values())
    w.f32(v);
  for (double v : model.k_dist())
    w.f32(v);
  for (double v : model.lrd())
    w.f32(v);
  for (auto j : model.neighbors())
    w.u16(j);
  if (!model.scaling().empty()) {
    for (double v : model.scaling().offset)
      w.f32(v);
    for (double v : model.scaling().scale)
      w.f32(v);
  }
  return w.take();
}

LofModel deserialize_model(std::span<const std::byte> bytes) {
  Reader r(bytes);
  r.need(sizeof(kMagic), "magic");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("bad magic: not a tinylof model file");
  for (std::size_t i = 0; i < sizeof(kMagic); ++i)
    r.uint<std::uint8_t>("magic");

  const auto version = r.u32("version");
  if (version != kModelFormatVersion)
    throw FormatError("unsupported model format version " + std::to_string(version));
  const std::size_t m = r.u32("point count");
  const std::size_t d = r.u32("dimension");
  const std::size_t k = r.u32("min_pts");
  LofParams params;
  params.min_pts = k;
  params.zero_dist_floor = r.f64("zero_dist_floor");
  const auto flags = r.u32("flags");
  if ((flags & ~kFlagScaling) != 0)
    throw FormatError("unknown flag bits in model header");
  params.normalize = (flags & kFlagScaling) != 0;

  if (m == 0 || d == 0 || k == 0 || m > kMaxModelPoints)
    throw FormatError("model header has invalid sizes");
  // Reject absurd headers before allocating.
  const std::size_t body = 4 * (m * d + 2 * m) + 2 * m * k + (params.normalize ? 8 * d : 0);
  r.need(body, "model arrays");

  auto points = r.f32_array(m * d, "points");
  auto k_dist = r.f32_array(m, "k_dist");
  auto lrd = r.f32_array(m, "lrd");
  std::vector<std::uint16_t> neighbors(m * k);
  for (auto &j : neighbors)
    j = r.u16("neighbors");
  FeatureScaling scaling;
  if (params.normalize) {
    scaling.offset = r.f32_array(d, "scaling offset");
    scaling.scale = r.f32_array(d, "scaling scale");
  }
  if (r.remaining() != 0)
    throw FormatError("model file has " + std::to_string(r.remaining()) + " trailing bytes");

  try {
    return LofModel(PointSet(m, d, std::move(points)), std::move(k_dist), std::move(lrd),
                    std::move(neighbors), params, std::move(scaling));
  } catch (const Error &e) {
    throw FormatError(std::string("model file is inconsistent: ") + e.what());
  }
}

void save_model(const LofModel &model, const std::filesystem::path &path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw InputError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw InputError("failed writing '" + path.string() + "'");
}

LofModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open model file '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(std::as_bytes(std::span<const char>(raw)));
}

LofModel quantize_to_float32(const LofModel &model) {
  return deserialize_model(serialize_model(model));
}

} // namespace tinylof
