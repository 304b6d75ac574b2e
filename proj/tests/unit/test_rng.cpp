#include <doctest.h>

#include <vector>

#include "latepoints/rng.hpp"

using namespace lp;

TEST_CASE("Philox4x32-10 known answers") {
  using B = Philox::Block;
  CHECK(Philox::block({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("Philox stream layout") {
  // seed is the key, the stream fills the upper counter words, blocks count from zero
  Philox p(0, 0);
  auto b = Philox::block({0, 0, 0, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) CHECK(p() == b[i]);
  Philox s(5, 0x0000000300000002ULL);
  auto c = Philox::block({0, 0, 2, 3}, {5, 0});
  for (int i = 0; i < 4; ++i) CHECK(s() == c[i]);
  auto c1 = Philox::block({1, 0, 2, 3}, {5, 0});
  CHECK(s() == c1[0]);
}

TEST_CASE("Philox is reproducible and streams differ") {
  Philox a(42, 1), b(42, 1), c(42, 2);
  bool differ = false;
  for (int i = 0; i < 1000; ++i) {
    auto x = a();
    CHECK(x == b());
    differ = differ || x != c();
  }
  CHECK(differ);
}

TEST_CASE("below and uniform stay in range and are roughly uniform") {
  Philox r(3, 0);
  std::vector<int> hist(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    auto k = r.below(6);
    REQUIRE(k < 6);
    ++hist[k];
    double u = r.uniform();
    REQUIRE(u > 0);
    REQUIRE(u < 1);
  }
  double chi2 = 0;
  for (int h : hist) chi2 += (h - n / 6.0) * (h - n / 6.0) / (n / 6.0);
  CHECK(chi2 < 20.5); // 0.999 quantile, 5 df
}
