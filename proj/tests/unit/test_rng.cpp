#include <set>

#include "doctest.h"
#include "matrixgt/rng.hpp"

using namespace matrixgt;

TEST_CASE("xorshift64* test vectors") {
  Xorshift64Star g(1);
  CHECK(g.next() == 0x47e4ce4b896cdd1dULL);
  CHECK(g.next() == 0xabcfa6a8e079651dULL);
  CHECK(g.next() == 0xb9d10d8feb731f57ULL);
}

TEST_CASE("frame stream seeding vectors") {
  const auto s = frame_stream_seed(1, 0);
  CHECK(s == 0x910a2dec89025cc1ULL);
  Xorshift64Star g(s);
  CHECK(g.next() == 0x4b46a55df3611b9bULL);
  CHECK(g.next() == 0xd7e1f1410e763ef4ULL);
  CHECK(g.next() == 0x5f14ec66975f9b06ULL);
  CHECK(frame_stream_seed(1, 1) != s);
  CHECK(frame_stream_seed(2, 0) != s);
}

TEST_CASE("uniform ranges") {
  Xorshift64Star g(99);
  std::set<std::int64_t> ints;
  for (int i = 0; i < 5000; ++i) {
    const double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = g.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
    const auto k = g.uniform_int(3, 8);
    CHECK(k >= 3);
    CHECK(k <= 8);
    ints.insert(k);
  }
  CHECK(ints.size() == 6);
  CHECK(g.uniform_int(4, 4) == 4);
}
