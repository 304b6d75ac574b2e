#include <doctest.h>

#include <cmath>

#include "latepoints/excursions.hpp"
#include "latepoints/interlacements.hpp"

using namespace lp;

TEST_CASE("equilibrium sampler masses sum to the capacity") {
  auto table = GreenTable::build(3, 6);
  Box B(Point{0, 0, 0}, 5);
  auto box = EquilibriumSampler::forBox(B, table);
  auto full = EquilibriumSampler::forSet(B.asSet(), table);
  CHECK(box.cap() == doctest::Approx(full.cap()).epsilon(1e-9));
  double sum = 0;
  for (double m : box.mass()) sum += m;
  CHECK(sum == doctest::Approx(box.cap()).epsilon(1e-12));
  CHECK(box.interiorResidual() < 1e-9);
}

TEST_CASE("vacancy law of a singleton") {
  auto table = GreenTable::build(3, 2);
  FiniteSet K(3, {Point{0, 0, 0}});
  CHECK(vacantProbability(K, 1.5, table) == doctest::Approx(std::exp(-1.5 / table.g0())));

  Box B(Point{0, 0, 0}, 3);
  auto eq = EquilibriumSampler::forSet(B.asSet(), table);
  RIConfig cfg;
  cfg.u = 1.0;
  cfg.truncationRadius = 20;
  cfg.acceptBias = true;
  const std::size_t n = 4000;
  std::size_t vacant = 0;
  auto centre = static_cast<std::size_t>(B.index(Point{0, 0, 0}));
  for (std::size_t r = 0; r < n; ++r) {
    cfg.stream = r;
    auto s = sampleRI(B.asSet(), eq, cfg);
    vacant += s.vacant(centre, 1.0);
  }
  const double p = std::exp(-1 / table.g0());
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(static_cast<double>(vacant) / n - p) < 4 * se);
}

namespace {
Point px(int x) { return Point{x, 0, 0}; }
} // namespace

TEST_CASE("excursion schedule of a hand-made trace") {
  Box B1(Point{0, 0, 0}, 3), B2(Point{0, 0, 0}, 5), B3(Point{0, 0, 0}, 9);
  std::vector<Point> trace;
  for (int x : {0, 1, 2, 3, 4, 5,                  // t = 0..5, leaves B3 at t = 5
                4, 3, 2, 1, 0, 1, 2, 3, 4, 5,      // R1 = 8, H1 = 9, D1 = 15
                4, 3, 2, 3, 4, 5,                  // R2 = 18, D2 = 21, misses B1
                4, 3, 2})                          // R3 = 24, still open
    trace.push_back(px(x));
  auto s = excursionDecompose(trace, B1, B2, B3);
  CHECK(s.D0 == 5);
  REQUIRE(s.returns() == 3);
  CHECK(s.R == std::vector<std::uint64_t>{8, 18, 24});
  CHECK(s.D == std::vector<std::uint64_t>{15, 21, kNever});
  CHECK(s.H == std::vector<std::uint64_t>{9, kNever, kNever});
  CHECK(s.entry[0] == px(2));
  CHECK(s.exit[1] == px(5));
  CHECK(s.ranges[0] == std::vector<Point>{px(0), px(1), px(2)});
  CHECK(s.ranges[1].empty());
  CHECK(s.validate(B1, B2, B3).empty());

  CHECK(countRW(s, 8, 1) == 0);
  CHECK(countRW(s, 19, 1) == 2);
  CHECK(countRW(s, 25, 1) == 3);
  CHECK(s.returnsBefore(18) == 1);
}

TEST_CASE("nesting is enforced") {
  CHECK_THROWS(checkNesting(Box(Point{0, 0, 0}, 5), Box(Point{0, 0, 0}, 3), Box(Point{0, 0, 0}, 9)));
  CHECK_THROWS(checkNesting(Box(Point{0, 0, 0}, 3), Box(Point{1, 0, 0}, 5), Box(Point{0, 0, 0}, 9)));
}
