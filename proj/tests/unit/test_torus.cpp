#include <doctest.h>

#include <cmath>

#include "latepoints/potential.hpp"
#include "latepoints/torus_walk.hpp"

using namespace lp;

TEST_CASE("torus indexing and wraparound") {
  Torus T(5, 3);
  CHECK(T.sites() == 125);
  for (std::uint64_t i = 0; i < T.sites(); ++i) CHECK(T.index(T.coords(i).data()) == i);
  int x[3] = {4, 0, 2};
  auto i = T.index(x);
  auto e = T.coords(T.neighbour(i, 0, +1));
  CHECK(e == std::vector<int>{0, 0, 2});
  e = T.coords(T.neighbour(i, 1, -1));
  CHECK(e == std::vector<int>{4, 4, 2});
}

TEST_CASE("walker moves to a neighbour each step") {
  TorusConfig cfg;
  cfg.N = 4;
  cfg.d = 3;
  cfg.seed = 9;
  TorusWalker w(cfg);
  const Torus& T = w.torus();
  for (int t = 0; t < 2000; ++t) {
    auto prev = w.site();
    w.step();
    int moved = 0;
    for (int k = 0; k < 3; ++k)
      for (int s : {-1, 1}) moved += T.neighbour(prev, k, s) == w.site();
    REQUIRE(moved >= 1);
    REQUIRE(T.index(w.x()) == w.site());
  }
  CHECK(w.time() == 2000);
}

TEST_CASE("time scale and threshold") {
  const double g0 = greenAtOrigin(3);
  CHECK(uScale(0.5, 1000, g0) == doctest::Approx(0.5 * g0 * std::log(1000.0)));
  CHECK(lateThreshold(2.5, 8) == 20);
  CHECK(lateThreshold(2.49, 8) == 19);
}

TEST_CASE("late sets agree across the three constructions") {
  TorusConfig cfg;
  cfg.N = 12;
  cfg.d = 3;
  cfg.seed = 4;
  cfg.stream = 2;
  const double g0 = greenAtOrigin(3);
  auto field = runUntilCover(cfg);
  CHECK(field.coverTime() == field.horizon);
  std::vector<double> alphas{0.8, 0.5, 0.65};
  auto nested = lateSetsDirect(cfg, alphas, g0);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    auto a = lateSet(field, alphas[i]);
    auto b = lateSetDirect(cfg, alphas[i], g0);
    CHECK(a.threshold == b.threshold);
    CHECK(a.members == b.members);
    CHECK(nested[i].members == b.members);
  }
  CHECK(nested[0].members.size() <= nested[2].members.size());
  CHECK(nested[2].members.size() <= nested[1].members.size());
}

TEST_CASE("runWalk counts every step") {
  TorusConfig cfg;
  cfg.N = 6;
  cfg.d = 3;
  auto r = runWalk(cfg, 5000);
  CHECK(r.local.total() == 5001);
  auto f = runUntilCover(cfg, 100);
  CHECK(f.markTime == 100);
  CHECK(f.markSite < 216);
  for (auto h : f.firstHit) CHECK(h <= f.horizon);
}
