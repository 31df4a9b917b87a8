#include "tinylof/error.hpp"
#include "tinylof/model_io.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <random>
#include <unistd.h>

using namespace tinylof;

namespace {

LofModel sample_model(bool normalize = false, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  PointSet pts(12, 3);
  for (std::size_t i = 0; i < 12; ++i)
    for (auto &v : pts.row(i))
      v = u(rng);
  return train(pts, LofParams{4, 1e-9, normalize});
}

std::uint32_t u32_at(const std::vector<std::byte> &b, std::size_t off) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
  return v;
}

} // namespace

TEST_CASE("header layout is little-endian and fixed") {
  const auto model = sample_model();
  const auto bytes = serialize_model(model);
  REQUIRE(bytes.size() == kModelHeaderBytes + 4 * (12 * 3 + 12 + 12) + 2 * 12 * 4);
  CHECK(std::memcmp(bytes.data(), "TLOF", 4) == 0);
  CHECK(u32_at(bytes, 4) == kModelFormatVersion);
  CHECK(u32_at(bytes, 8) == 12);
  CHECK(u32_at(bytes, 12) == 3);
  CHECK(u32_at(bytes, 16) == 4);
  std::uint64_t eps_bits = 0;
  for (std::size_t i = 0; i < 8; ++i)
    eps_bits |= static_cast<std::uint64_t>(bytes[20 + i]) << (8 * i);
  CHECK(std::bit_cast<double>(eps_bits) == 1e-9);
  CHECK(u32_at(bytes, 28) == 0);
  // First point coordinate, as float32.
  CHECK(std::bit_cast<float>(u32_at(bytes, 32)) == static_cast<float>(model.points().row(0)[0]));
}

TEST_CASE("round trip preserves the model up to float32 rounding") {
  for (bool normalize : {false, true}) {
    const auto model = sample_model(normalize, 7);
    const auto back = deserialize_model(serialize_model(model));
    CHECK(back.size() == model.size());
    CHECK(back.dim() == model.dim());
    CHECK(back.params() == model.params());
    CHECK(std::equal(back.neighbors().begin(), back.neighbors().end(),
                     model.neighbors().begin()));
    for (std::size_t i = 0; i < model.size(); ++i) {
      CHECK(back.lrd()[i] == static_cast<float>(model.lrd()[i]));
      CHECK(back.k_dist()[i] == static_cast<float>(model.k_dist()[i]));
    }
    CHECK(back.scaling().empty() == !normalize);
    // Re-serializing the loaded model is a fixed point.
    CHECK(serialize_model(back) == serialize_model(model));
    const std::vector<double> q{0.3, -0.2, 1.0};
    CHECK(score(back, q) == doctest::Approx(score(model, q)).epsilon(1e-5));
  }
}

TEST_CASE("corrupt inputs raise format errors") {
  const auto bytes = serialize_model(sample_model());
  for (std::size_t cut : {std::size_t{0}, std::size_t{3}, std::size_t{20}, kModelHeaderBytes,
                          bytes.size() - 1}) {
    CAPTURE(cut);
    CHECK_THROWS_AS(deserialize_model(std::span(bytes).first(cut)), FormatError);
  }
  auto bad = bytes;
  bad[0] = std::byte{'X'};
  CHECK_THROWS_AS(deserialize_model(bad), FormatError);
  bad = bytes;
  bad[4] = std::byte{9};
  CHECK_THROWS_AS(deserialize_model(bad), FormatError);
  bad = bytes;
  bad.push_back(std::byte{0});
  CHECK_THROWS_AS(deserialize_model(bad), FormatError);
  // Huge point count must fail on length, not allocate.
  bad = bytes;
  bad[8] = bad[9] = std::byte{0xff};
  CHECK_THROWS_AS(deserialize_model(bad), FormatError);
  // Neighbour index pointing at itself breaks a model invariant.
  bad = bytes;
  const std::size_t nbr0 = kModelHeaderBytes + 4 * (12 * 3 + 24);
  bad[nbr0] = std::byte{0};
  bad[nbr0 + 1] = std::byte{0};
  CHECK_THROWS_AS(deserialize_model(bad), FormatError);
}

TEST_CASE("save and load through a file") {
  const auto path = std::filesystem::temp_directory_path() /
                    ("tinylof_model_" + std::to_string(::getpid()) + ".bin");
  const auto model = sample_model();
  save_model(model, path);
  const auto back = load_model(path);
  CHECK(serialize_model(back) == serialize_model(model));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), InputError);
}
