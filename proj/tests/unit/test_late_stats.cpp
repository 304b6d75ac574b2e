#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latepoints/late_stats.hpp"

using namespace lp;

namespace {
FiniteSet pairAlong(int k) {
  Point e{0, 0, 0};
  e[k] = 1;
  return FiniteSet(3, {Point{0, 0, 0}, e});
}

double exp1(double x) { return x <= 0 ? 0 : 1 - std::exp(-x); }
} // namespace

TEST_CASE("box offsets") {
  CHECK(boxOffsets(1) == std::pair<int, int>{0, 0});
  CHECK(boxOffsets(4) == std::pair<int, int>{-1, 2});
  CHECK(boxOffsets(5) == std::pair<int, int>{-2, 2});
}

TEST_CASE("symmetry classes") {
  CHECK(symmetryImages(pairAlong(0)).size() == 3);
  CHECK(symmetryImages(shapeK1(3)).size() == 3);
  CHECK(symmetryImages(shapeK2(3)).size() == 12);
  CHECK(symmetryImages(FiniteSet(3, {Point{0, 0, 0}, Point{1, 1, 1}})).size() == 4);
  auto a = canonicalForm(FiniteSet(3, {Point{5, 2, 0}, Point{5, 3, 0}, Point{4, 3, 0}}));
  auto b = canonicalForm(shapeK2(3));
  CHECK(a.points == b.points);
}

TEST_CASE("double points equal the sum of axis pattern counts") {
  Torus T(10, 3);
  auto field = bernoulliField(T.sites(), 0.3, 17);
  auto S = field.realize(0.3);
  std::uint64_t viaPatterns = 0;
  for (int k = 0; k < 3; ++k) viaPatterns += patternCount(S, T, pairAlong(k));
  CHECK(doublePoints(S, T) == viaPatterns);
  CHECK(patternCountAllImages(S, T, pairAlong(0)) == viaPatterns);

  // brute force over all sites
  std::vector<char> in(T.sites(), 0);
  for (auto x : S) in[x] = 1;
  std::uint64_t brute = 0;
  for (std::uint64_t x = 0; x < T.sites(); ++x)
    for (int k = 0; k < 3; ++k) brute += in[x] && in[T.neighbour(x, k, +1)];
  CHECK(doublePoints(S, T) == brute);
}

TEST_CASE("double points of a subset of Z^d") {
  FiniteSet S(3, {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}, Point{3, 3, 3}});
  CHECK(doublePoints(S) == 2);
}

TEST_CASE("Bernoulli field is nested and has the right density") {
  auto f = bernoulliField(200000, 0.1, 3, 1);
  auto a = f.realize(0.05), b = f.realize(0.1);
  CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  const double se = std::sqrt(200000 * 0.05 * 0.95);
  CHECK(std::abs(static_cast<double>(a.size()) - 10000) < 4 * se);
  CHECK(bernoulliDensity(0.5, 100) == doctest::Approx(0.1));
}

TEST_CASE("pattern catalogue near the pair threshold") {
  auto shapes = enumeratePatterns(3, 0.58, 4);
  REQUIRE(shapes.size() == 5);
  std::vector<double> stars;
  for (const auto& s : shapes) stars.push_back(s.alphaStar);
  std::sort(stars.begin(), stars.end());
  CHECK(stars[0] == doctest::Approx(0.58485).epsilon(1e-4));
  CHECK(stars[1] == doctest::Approx(0.58621).epsilon(1e-4));
  CHECK(stars[2] == doctest::Approx(0.60919).epsilon(1e-4));
  CHECK(stars[3] == doctest::Approx(0.67027).epsilon(1e-4));
  CHECK(stars[4] == doctest::Approx(1.0));
}

TEST_CASE("Kolmogorov p-values") {
  // sqrt(n) D = 1.358 is the asymptotic 5% point
  CHECK(kolmogorovPValue(1.358 / std::sqrt(10000.0), 10000) == doctest::Approx(0.05).epsilon(0.05));
  CHECK(kolmogorovPValue(1.628 / std::sqrt(10000.0), 10000) == doctest::Approx(0.01).epsilon(0.08));
  CHECK(kolmogorovPValue(0.001, 100) == doctest::Approx(1.0));
}

TEST_CASE("KS test is calibrated under the null") {
  Philox rng(21, 0);
  int rejected = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(200);
    for (auto& v : x) v = rng.exponential();
    rejected += ksTest(x, exp1, 0.05).verdict == "fail";
  }
  // Binomial(400, 0.05): mean 20, sd 4.4
  CHECK(rejected >= 6);
  CHECK(rejected <= 36);

  std::vector<double> shifted(500);
  for (auto& v : shifted) v = rng.exponential() + 0.3;
  CHECK(ksTest(shifted, expCdf).verdict == "fail");
}

TEST_CASE("Poisson cell test is calibrated on Bernoulli fields") {
  Torus T(32, 3);
  int passes = 0;
  const int trials = 60;
  for (int t = 0; t < trials; ++t) {
    auto S = bernoulliField(T.sites(), 0.002, 40, t).realize(0.002);
    passes += poissonPPTest(S, T, 8).verdict == "pass";
  }
  CHECK(passes >= 54);

  // strongly clustered points are rejected
  SiteSet clustered;
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y)
      for (int z = 0; z < 2; ++z) {
        int c[3] = {x, y, z};
        clustered.push_back(T.index(c));
      }
  std::sort(clustered.begin(), clustered.end());
  CHECK(poissonPPTest(clustered, T, 8).verdict == "fail");
}

TEST_CASE("isolated occurrences") {
  Torus T(20, 3);
  auto at = [&](int x, int y, int z) {
    int c[3] = {x, y, z};
    return T.index(c);
  };
  // Q(x, R) has side R
  CHECK(isolatedOccurrences(SiteSet{at(12, 12, 12), at(12, 12, 14)}, T, FiniteSet(3, {Point{0, 0, 0}}), 2) == 2);
  SiteSet S{at(2, 2, 2), at(3, 2, 2), at(12, 12, 12), at(12, 12, 14)};
  std::sort(S.begin(), S.end());
  CHECK(isolatedOccurrences(S, T, pairAlong(0), 4) == 1);
  CHECK(isolatedOccurrences(S, T, FiniteSet(3, {Point{0, 0, 0}}), 3) == 2);
  CHECK(isolatedOccurrences(S, T, FiniteSet(3, {Point{0, 0, 0}}), 6) == 0);
}

TEST_CASE("Chen-Stein bound decreases in N above the pair threshold") {
  auto a = chenSteinBounds(0.8, 0.01, 32, 3, std::log(32.0));
  auto b = chenSteinBounds(0.8, 0.01, 64, 3, std::log(64.0));
  CHECK(a.bound > 0);
  CHECK(b.bound < a.bound);
}

TEST_CASE("scaling fit recovers a planted exponent") {
  std::vector<double> Ns{16, 24, 32, 48};
  std::vector<std::vector<double>> samples;
  Philox rng(8, 0);
  for (double N : Ns) {
    std::vector<double> s(200);
    for (auto& v : s) v = std::pow(N, 1.5) * (0.9 + 0.2 * rng.uniform());
    samples.push_back(s);
  }
  auto fit = scalingFit(Ns, samples, 0.5, 0.67, 3, 500, 1);
  CHECK(fit.fitted);
  CHECK(fit.slope == doctest::Approx(1.5).epsilon(0.02));
  CHECK(fit.lo <= fit.slope);
  CHECK(fit.hi >= fit.slope);
  CHECK(scalingFit(Ns, samples, 0.7, 0.67, 3, 100, 1).verdict == "subcritical");
}
