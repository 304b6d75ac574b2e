#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "latepoints/potential.hpp"

using namespace lp;

namespace {

// Watson's closed form for the simple random walk on Z^3.
double watsonG0() {
  const double pi = std::acos(-1.0);
  return std::sqrt(6.0) / (32 * pi * pi * pi) * std::tgamma(1.0 / 24) * std::tgamma(5.0 / 24) * std::tgamma(7.0 / 24) *
         std::tgamma(11.0 / 24);
}

// Green's function of the walk killed on leaving U, by dense inversion of I - P.
Eigen::MatrixXd killedGreen(const Box& U) {
  const auto n = static_cast<Eigen::Index>(U.volume());
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  const int d = U.dim();
  for (Eigen::Index i = 0; i < n; ++i)
    for (const auto& y : neighbours(U.point(i)))
      if (U.contains(y)) A(i, U.index(y)) -= 1.0 / (2 * d);
  return A.inverse();
}

} // namespace

TEST_CASE("g(0) in d=3 matches the closed form") {
  auto v = greenValue(Point{0, 0, 0});
  CHECK(v.value == doctest::Approx(watsonG0()).epsilon(1e-12));
  CHECK(v.err < 1e-12);
}

TEST_CASE("reference values of g(0)") {
  CHECK(std::abs(greenAtOrigin(3) - 1.516386059151978018) < 1e-12);
  CHECK(std::abs(greenAtOrigin(4) - 1.239467121848481713) < 1e-12);
  auto e = greenValueExtended(Point{0, 0, 0});
  CHECK(e.value.substr(0, 30) == "1.5163860591519780181560121596");
}

TEST_CASE("g is harmonic away from the origin") {
  auto table = GreenTable::build(3, 4);
  // g(0) = 1 + g(e1): the visit at time zero plus the mean over neighbours
  CHECK(table.g({0, 0, 0}) == doctest::Approx(1 + table.g({1, 0, 0})).epsilon(1e-12));
  for (Point x : {Point{1, 0, 0}, Point{1, 1, 0}, Point{2, 1, 1}, Point{3, 2, 0}}) {
    double mean = 0;
    for (const auto& y : neighbours(x)) mean += table.g(y) / 6;
    CHECK(table.g(x) == doctest::Approx(mean).epsilon(1e-11));
  }
}

TEST_CASE("g decays like 3/(2 pi |x|)") {
  const double pi = std::acos(-1.0);
  GreenParams params;
  params.maxOrder = 30;
  auto v = greenValue(Point{30, 0, 0}, params);
  CHECK(v.value == doctest::Approx(3 / (2 * pi * 30)).epsilon(0.01));
  CHECK(v.value == doctest::Approx(greenAsymptotic(Point{30, 0, 0})).epsilon(1e-4));
}

TEST_CASE("capacities of small sets") {
  auto table = GreenTable::build(3, 3);
  const double g0 = table.g0();
  auto one = capacity(FiniteSet(3, {Point{0, 0, 0}}), table);
  CHECK(one.cap == doctest::Approx(1 / g0).epsilon(1e-13));
  CHECK(one.alphaStar == doctest::Approx(1.0).epsilon(1e-12));

  auto pair = capacity(FiniteSet(3, {Point{0, 0, 0}, Point{1, 0, 0}}), table);
  CHECK(pair.cap == doctest::Approx(2 / (g0 + table.g({1, 0, 0}))).epsilon(1e-13));
  CHECK(pair.alphaStar == doctest::Approx(0.670268665).epsilon(1e-8));
  CHECK(alphaStarNeighbors(table) == doctest::Approx(1 - 1 / (2 * g0)).epsilon(1e-13));

  // K1 by Cramer's rule on the symmetric 3x3 system
  const double a = g0, b = table.g({1, 0, 0}), c = table.g({2, 0, 0});
  // e = (p, q, p): a p + b q + c p = 1, 2 b p + a q = 1
  const double p = (a - b) / ((a + c) * a - 2 * b * b), q = (1 - 2 * b * p) / a;
  auto k1 = capacity(shapeK1(3), table);
  CHECK(k1.cap == doctest::Approx(2 * p + q).epsilon(1e-12));
  CHECK(k1.residual < 1e-12);
  double sum = 0;
  for (double e : k1.equilibrium) sum += e;
  CHECK(sum == doctest::Approx(k1.cap).epsilon(1e-13));
}

TEST_CASE("classification and the tabulated capacities") {
  auto c3 = classifyAdmissible(3);
  CHECK(!c3.refused);
  CHECK(c3.connectedTriplesAdmissible);
  CHECK(!c3.otherTriplesAdmissible);
  double maxK = 0, minA = 1e9;
  for (const auto& cmp : c3.comparisons) {
    if (cmp.name == "K1" || cmp.name == "K2") maxK = std::max(maxK, cmp.cap);
    else minA = std::min(minA, cmp.cap);
  }
  CHECK(std::abs(maxK - 1.271113197748638670916) < 1e-12);
  CHECK(std::abs(minA - 1.335471948363948449723) < 1e-12);

  auto c4 = classifyAdmissible(4);
  CHECK(!c4.connectedTriplesAdmissible);
  double min4 = 1e9;
  for (const auto& cmp : c4.comparisons) min4 = std::min(min4, cmp.cap);
  CHECK(std::abs(min4 - 1.849398784221098051683) < 1e-12);
}

TEST_CASE("relative capacity against a dense killed Green's function") {
  for (int side : {3, 5}) {
    Box U(Point{0, 0, 0}, side);
    auto GU = killedGreen(U);
    FiniteSet K(3, {Point{0, 0, 0}, Point{1, 0, 0}});
    Eigen::Matrix2d A;
    const auto i0 = U.index(Point{0, 0, 0}), i1 = U.index(Point{1, 0, 0});
    A << GU(i0, i0), GU(i0, i1), GU(i1, i0), GU(i1, i1);
    Eigen::Vector2d e = A.ldlt().solve(Eigen::Vector2d::Ones());
    auto r = relativeCapacity(K, U);
    CHECK(r.cap == doctest::Approx(e.sum()).epsilon(1e-9));
    CHECK(r.equilibrium[0] == doctest::Approx(e[0]).epsilon(1e-9));
  }
  // relative capacity shrinks to the free one as U grows
  FiniteSet K(3, {Point{0, 0, 0}});
  CHECK(relativeCapacity(K, Box(Point{0, 0, 0}, 21)).cap > 1 / greenAtOrigin(3));
  CHECK(relativeCapacity(K, Box(Point{0, 0, 0}, 21)).cap < relativeCapacity(K, Box(Point{0, 0, 0}, 11)).cap);
}
