#include <doctest.h>

#include <cmath>

#include "latepoints/experiments.hpp"
#include "latepoints/slt.hpp"

using namespace lp;

namespace {
ChainSpec uniformTwoState() {
  ChainSpec s;
  s.states = {"a", "b"};
  s.mu = {1, 1};
  s.densities = {{0.5, 0.5, 0.5, 0.5}};
  s.initial = {1, 0};
  return s;
}
} // namespace

TEST_CASE("soft local times on a hand-made cloud") {
  auto spec = uniformTwoState();
  spec.validate();
  auto eta = PoissonCloud::finite(spec.mu, {{0.3, 0.9}, {0.2, 1.0}});
  auto run = forwardSLT(spec, eta, 0, 2);
  // xi_1 = min(0.3, 0.2) / 0.5, lands on b; G_1 = 0.2 everywhere
  // xi_2 = (0.3 - 0.2) / 0.5, lands on a
  CHECK(run.chain == std::vector<std::size_t>{0, 1, 0});
  REQUIRE(run.state.xi.size() == 2);
  CHECK(run.state.xi[0] == doctest::Approx(0.4));
  CHECK(run.state.xi[1] == doctest::Approx(0.2));
  CHECK(run.state.G[0] == doctest::Approx(0.3));
  CHECK(run.state.G[1] == doctest::Approx(0.3));
  CHECK(checkSLTInvariants(spec, eta, run).empty());
}

TEST_CASE("spec validation and JSON round trip") {
  auto spec = uniformTwoState();
  auto back = ChainSpec::fromJson(spec.toJson());
  CHECK(back.densities == spec.densities);
  spec.densities[0][1] = 0.7;
  CHECK_THROWS(spec.validate());
}

TEST_CASE("inverse soft local times reproduce the chain") {
  Philox rng(11, 0);
  for (int rep = 0; rep < 30; ++rep) {
    auto spec = ChainSpec::random(4, 3, rng);
    const std::size_t T = 12;
    auto z0 = sampleInitial(spec, rng);
    auto chain = sampleChain(spec, z0, T, rng);
    std::vector<double> xiHat(T);
    for (auto& x : xiHat) x = rng.exponential();
    auto base = PoissonCloud::lazy(spec.mu, 11, 100 + rep);
    auto eta = inverseSLT(spec, chain, xiHat, base, T);
    auto run = forwardSLT(spec, eta, chain[0], T);
    CHECK(run.chain == chain);
    for (std::size_t i = 0; i < T; ++i) CHECK(run.state.xi[i] == doctest::Approx(xiHat[i]).epsilon(1e-9));
  }
}

TEST_CASE("closed-form and literal inverse agree") {
  Philox rng(12, 0);
  auto spec = ChainSpec::random(3, 2, rng);
  const std::size_t T = 6;
  auto chain = sampleChain(spec, 0, T, rng);
  std::vector<double> xiHat(T);
  for (auto& x : xiHat) x = rng.exponential();
  auto base = PoissonCloud::finite(spec.mu, {{0.5, 2.0}, {1.0}, {0.1, 3.0}});
  auto a = inverseSLT(spec, chain, xiHat, base, T);
  auto b = inverseSLTLiteral(spec, chain, xiHat, base, T);
  for (std::size_t z = 0; z < 3; ++z)
    for (std::size_t i = 0; i < 4; ++i) {
      const double x = a.at(z, i), y = b.at(z, i);
      if (std::isinf(x) || std::isinf(y)) CHECK(x == y);
      else CHECK(x == doctest::Approx(y).epsilon(1e-12));
    }
}

TEST_CASE("suite: round trips, two-step law and coupling inclusions") {
  auto s = sltSuite(200, 4000, 200, 5);
  CHECK(s.chainMismatches == 0);
  CHECK(s.maxMarkError < 1e-9);
  CHECK(s.tv < 0.05);
  CHECK(s.ksStep1.p > 0.001);
  CHECK(s.ksStep2.p > 0.001);
  CHECK(s.checked > 0);
  CHECK(s.violations == 0);
}
