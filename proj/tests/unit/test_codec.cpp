#include <cmath>
#include <limits>

#include "doctest.h"
#include "matrixgt/codec.hpp"
#include "matrixgt/error.hpp"

using namespace matrixgt;

namespace {
// 30-digit reference values computed offline with mpmath.
constexpr double kLn200OverLn4000 = 0.6388094593659630467527082654;
constexpr double kDepthAt063882 = 30.0026228509073182048521931862;
}  // namespace

TEST_CASE("log depth boundaries") {
  const DepthCodecParams p;
  CHECK(encode_log_depth(p.near_m, p) == 0.0);
  CHECK(encode_log_depth(p.far_m, p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(linearize_depth(0.0, p) == doctest::Approx(p.near_m).epsilon(1e-15));
  CHECK(linearize_depth(1.0, p) == doctest::Approx(p.far_m).epsilon(1e-15));
}

TEST_CASE("log depth reference values") {
  const DepthCodecParams p{0.15, 600.0};
  CHECK(std::abs(encode_log_depth(30.0, p) - kLn200OverLn4000) < 1e-14);
  CHECK(std::abs(linearize_depth(0.63882, p) - kDepthAt063882) < 1e-10);
  CHECK(linearize_depth(0.63882, p) == doctest::Approx(30.0).epsilon(1e-3));
}

TEST_CASE("out of range values are clamped and counted") {
  const DepthCodecParams p;
  CHECK(encode_log_depth(0.01, p) == 0.0);
  CHECK(encode_log_depth(1e6, p) == doctest::Approx(1.0));
  std::size_t clamped = 0;
  CHECK(linearize_depth(-0.5, p, &clamped) == doctest::Approx(p.near_m));
  CHECK(linearize_depth(1.5, p, &clamped) == doctest::Approx(p.far_m));
  CHECK(linearize_depth(0.5, p, &clamped) > p.near_m);
  CHECK(clamped == 2);
}

TEST_CASE("invalid codec params") {
  CHECK_THROWS_AS(encode_log_depth(1.0, DepthCodecParams{0.0, 10.0}), ConfigError);
  CHECK_THROWS_AS(encode_log_depth(1.0, DepthCodecParams{5.0, 5.0}), ConfigError);
  CHECK_THROWS_AS(linearize_depth(0.5, DepthCodecParams{10.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(linearize_depth(0.5, DepthCodecParams{-1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(DepthCodecParams({1.0, std::numeric_limits<double>::infinity()}).validate(), ConfigError);
}

TEST_CASE("depth round trip and monotonicity over log-spaced depths") {
  const DepthCodecParams p;
  const int n = 10000;
  double prev = -1.0;
  for (int i = 0; i < n; ++i) {
    const double z = p.near_m * std::pow(p.far_m / p.near_m, static_cast<double>(i) / (n - 1));
    const double d = encode_log_depth(z, p);
    CHECK(d > prev);
    prev = d;
    // stored as binary32, as in the depth raster
    const double back = linearize_depth(static_cast<float>(d), p);
    REQUIRE(std::abs(back - z) / z <= 1e-5);
  }
}

TEST_CASE("stencil pack examples") {
  CHECK(pack_stencil({3, 5}) == 0x53);
  CHECK(pack_stencil({0, 0}) == 0x00);
  CHECK(pack_stencil({15, 15}) == 0xFF);
  CHECK(unpack_stencil(0xF2) == StencilValue{2, 15});
  CHECK(unpack_stencil(0x00) == StencilValue{0, 0});
  CHECK(unpack_stencil(0x53) == StencilValue{3, 5});
  CHECK_THROWS_AS(pack_stencil({16, 0}), DomainError);
  CHECK_THROWS_AS(pack_stencil({0, 16}), DomainError);
  CHECK_THROWS_AS(pack_stencil({-1, 0}), DomainError);
}

TEST_CASE("stencil bijection over every byte") {
  bool seen[256] = {};
  for (int b = 0; b < 256; ++b) {
    const auto v = unpack_stencil(static_cast<std::uint8_t>(b));
    CHECK(v.class_id == (b & 0x0F));
    CHECK(v.flags == (b >> 4));
    const auto again = pack_stencil(v);
    CHECK(again == b);
    seen[again] = true;
  }
  for (int c = 0; c < 16; ++c)
    for (int f = 0; f < 16; ++f) CHECK(unpack_stencil(pack_stencil({c, f})) == StencilValue{c, f});
  for (bool s : seen) CHECK(s);
}

TEST_CASE("class names") {
  CHECK(class_code(ObjectClass::Vehicle) == 2);
  for (auto c : {ObjectClass::Background, ObjectClass::Ground, ObjectClass::Vehicle, ObjectClass::Distractor})
    CHECK(parse_class_name(class_name(c)) == c);
  CHECK_THROWS_AS(parse_class_name("Truck"), FormatError);
}
