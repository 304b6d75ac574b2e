#include "latepoints/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "latepoints/parallel.hpp"

namespace lp {

namespace {
std::pair<double, double> meanSe(const std::vector<double>& v) {
  if (v.empty()) return {0, 0};
  const double n = static_cast<double>(v.size());
  double m = std::accumulate(v.begin(), v.end(), 0.0) / n, s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(s / (n - 1) / n) : 0.0};
}

FiniteSet centred(const FiniteSet& K, const Box& B) {
  Point lo = K.points.front(), hi = lo;
  for (const auto& p : K.points)
    for (int k = 0; k < K.d; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  Point shift(K.d);
  for (int k = 0; k < K.d; ++k) shift[k] = B.center[k] - static_cast<int>(std::floor((lo[k] + hi[k]) / 2.0));
  auto out = K.translated(shift);
  for (const auto& p : out.points)
    if (!B.contains(p)) throw std::invalid_argument("vacancyStudy: shape does not fit in the region");
  return out;
}
} // namespace

VacancyStudy vacancyStudy(const std::vector<std::pair<std::string, FiniteSet>>& shapes, const std::vector<double>& us,
                          std::size_t replicas, int regionSide, int truncationRadius, std::uint64_t seed, int jobs) {
  if (shapes.empty() || us.empty()) throw std::invalid_argument("vacancyStudy: nothing to estimate");
  const int d = shapes.front().second.d;
  Box B(Point(d, 0), regionSide);
  VacancyStudy st;
  st.region = B.asSet();
  st.truncationRadius = truncationRadius;
  auto table = GreenTable::build(d, regionSide);
  auto eq = EquilibriumSampler::forSet(st.region, table);
  std::vector<std::vector<std::size_t>> idx;
  std::vector<double> caps;
  for (const auto& [name, K] : shapes) {
    auto Kc = centred(K, B);
    std::vector<std::size_t> v;
    for (const auto& p : Kc.points)
      v.push_back(static_cast<std::size_t>(std::lower_bound(st.region.points.begin(), st.region.points.end(), p) -
                                           st.region.points.begin()));
    idx.push_back(v);
    caps.push_back(capacity(Kc, table).cap);
  }
  const double umax = *std::max_element(us.begin(), us.end());
  const std::size_t S = shapes.size(), U = us.size();
  std::vector<std::vector<char>> vac(replicas, std::vector<char>(S * U, 0));
  std::vector<double> bias(replicas, 0);
  parallelFor(replicas, jobs, [&](std::size_t r) {
    RIConfig c;
    c.u = umax;
    c.truncationRadius = truncationRadius;
    c.acceptBias = true;
    c.seed = seed;
    c.stream = replicaStream(5, r);
    auto s = sampleRI(st.region, eq, c);
    bias[r] = s.truncationBiasBound;
    for (std::size_t k = 0; k < S; ++k)
      for (std::size_t j = 0; j < U; ++j) {
        bool v = true;
        for (auto i : idx[k]) v = v && s.vacant(i, us[j]);
        vac[r][k * U + j] = v;
      }
  });
  st.truncationBias = bias.empty() ? 0 : bias.front();
  for (std::size_t k = 0; k < S; ++k)
    for (std::size_t j = 0; j < U; ++j) {
      VacancyCell c;
      c.shape = shapes[k].first;
      c.u = us[j];
      c.replicas = replicas;
      for (std::size_t r = 0; r < replicas; ++r) c.vacant += vac[r][k * U + j];
      c.p = static_cast<double>(c.vacant) / static_cast<double>(replicas);
      c.exact = std::exp(-us[j] * caps[k]);
      c.se = std::sqrt(c.exact * (1 - c.exact) / static_cast<double>(replicas));
      c.z = (c.p - c.exact) / c.se;
      st.cells.push_back(c);
    }
  return st;
}

PhaseStudy phaseStudy(const std::vector<int>& Ns, const std::vector<double>& alphas, int d, std::size_t replicas,
                      std::uint64_t seed, int jobs) {
  PhaseStudy st;
  st.d = d;
  const double g0 = greenAtOrigin(d);
  // D[a][n][r]
  std::vector<std::vector<std::vector<double>>> D(alphas.size(), std::vector<std::vector<double>>(Ns.size(), std::vector<double>(replicas)));
  auto late = D;
  for (std::size_t n = 0; n < Ns.size(); ++n) {
    Torus T(Ns[n], d);
    parallelFor(replicas, jobs, [&](std::size_t r) {
      TorusConfig c;
      c.N = Ns[n];
      c.d = d;
      c.seed = seed;
      c.stream = replicaStream(static_cast<std::uint64_t>(Ns[n]), r);
      auto L = lateSetsDirect(c, alphas, g0);
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        D[a][n][r] = static_cast<double>(doublePoints(L[a].members, T));
        late[a][n][r] = static_cast<double>(L[a].members.size());
      }
    });
  }
  const double aStar = 1 - 1 / (2 * g0);
  std::vector<double> Nd(Ns.begin(), Ns.end());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (std::size_t n = 0; n < Ns.size(); ++n) {
      PhaseCell c;
      c.alpha = alphas[a];
      c.N = Ns[n];
      c.replicas = replicas;
      std::tie(c.meanD, c.se) = meanSe(D[a][n]);
      c.meanLate = meanSe(late[a][n]).first;
      c.D = D[a][n];
      st.cells.push_back(std::move(c));
    }
    if (Ns.size() >= 3) st.fits.push_back(scalingFit(Nd, D[a], alphas[a], aStar, d, 2000, seed));
  }
  return st;
}

Figure1Data figure1Data(int N, int d, double alpha, std::uint64_t seed, std::uint64_t stream) {
  Figure1Data f;
  f.N = N;
  f.d = d;
  f.alpha = alpha;
  f.seed = seed;
  f.stream = stream;
  TorusConfig c;
  c.N = N;
  c.d = d;
  c.seed = seed;
  c.stream = stream;
  Torus T(N, d, c.maxSites);
  f.late = lateSetDirect(c, alpha, greenAtOrigin(d)).members;
  const double cardF = static_cast<double>(T.sites());
  f.bernoulli = bernoulliField(T.sites(), bernoulliDensity(alpha, cardF), seed, stream | (1ULL << 62)).site;
  f.lateDouble = doublePoints(f.late, T);
  f.bernoulliDouble = doublePoints(f.bernoulli, T);
  return f;
}

ExpLawStudy expLawStudy(int N, int d, std::size_t seeds, std::uint64_t seed, int jobs) {
  ExpLawStudy st;
  st.N = N;
  st.d = d;
  const double g0 = greenAtOrigin(d);
  st.alphaStar = 1 - 1 / (2 * g0);
  st.R = std::pow(std::log(static_cast<double>(N)), 1.0 / (d - 2));
  Torus T(N, d);
  const auto tStar = lateThreshold(uScale(st.alphaStar, static_cast<double>(T.sites()), g0), T.sites());
  std::vector<std::vector<double>> per(seeds);
  parallelFor(seeds, jobs, [&](std::size_t s) {
    TorusConfig c;
    c.N = N;
    c.d = d;
    c.seed = seed;
    c.stream = replicaStream(7, s);
    per[s] = expLawSamples(runUntilCover(c, tStar), st.alphaStar, st.R);
  });
  for (const auto& v : per) {
    st.perSeed.push_back(v.size());
    st.pooled.insert(st.pooled.end(), v.begin(), v.end());
  }
  st.mean = meanSe(st.pooled).first;
  st.ks = expLawTest(st.pooled);
  return st;
}

std::vector<PoissonStudy> poissonStudy(int N, int d, const std::vector<double>& alphas, std::size_t seeds, int cellsPerSide,
                                       std::uint64_t seed, int jobs) {
  const double g0 = greenAtOrigin(d);
  Torus T(N, d);
  std::vector<PoissonStudy> out(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    out[a].alpha = alphas[a];
    out[a].N = N;
    out[a].results.resize(seeds);
  }
  parallelFor(seeds, jobs, [&](std::size_t s) {
    TorusConfig c;
    c.N = N;
    c.d = d;
    c.seed = seed;
    c.stream = replicaStream(11, s);
    auto L = lateSetsDirect(c, alphas, g0);
    for (std::size_t a = 0; a < alphas.size(); ++a) out[a].results[s] = poissonPPTest(L[a].members, T, cellsPerSide);
  });
  for (auto& st : out)
    for (const auto& r : st.results) st.passes += r.verdict == "pass";
  return out;
}

RIExcursionStudy riExcursionStudy(int r1, int r2, int r3, int sourceSide, double u, int truncationRadius,
                                  std::size_t samples, std::uint64_t seed, int jobs) {
  const int d = 3;
  Point o(d, 0);
  Box B1(o, r1), B2(o, r2), B3(o, r3), S(o, sourceSide);
  RIExcursionStudy st;
  st.u = u;
  st.M = relativeCapacity(B2.asSet(), B3).cap;
  auto eq = EquilibriumSampler::forBox(S, GreenTable::build(d, sourceSide - 1));
  auto src = S.asSet();
  st.samples.resize(samples);
  std::vector<double> bias(samples);
  std::vector<std::int64_t> traj(samples);
  parallelFor(samples, jobs, [&](std::size_t i) {
    RIConfig c;
    c.u = u;
    c.truncationRadius = truncationRadius;
    c.acceptBias = true;
    c.seed = seed;
    c.stream = replicaStream(13, i);
    auto r = riExcursions(src, eq, c, B1, B2, B3);
    st.samples[i] = static_cast<double>(r.total);
    bias[i] = r.truncationBiasBound;
    traj[i] = r.trajectories;
  });
  std::tie(st.mean, st.se) = meanSe(st.samples);
  st.truncationBias = bias.empty() ? 0 : bias.front();
  st.trajectories = std::accumulate(traj.begin(), traj.end(), std::int64_t{0});
  return st;
}

RWExcursionStudy rwExcursionStudy(int N, int r1, int r2, int r3, double targetUM, std::uint64_t seed) {
  const int d = 3;
  Point c(d, N / 2);
  Box B1(c, r1), B2(c, r2), B3(c, r3);
  RWExcursionStudy st;
  st.N = N;
  st.M = relativeCapacity(Box(Point(d, 0), r2).asSet(), Box(Point(d, 0), r3)).cap;
  st.u = targetUM / st.M;
  const auto sites = static_cast<std::uint64_t>(std::pow(N, d));
  st.steps = static_cast<std::uint64_t>(std::ceil(st.u * static_cast<double>(sites)));
  TorusConfig cfg;
  cfg.N = N;
  cfg.d = d;
  cfg.seed = seed;
  cfg.stream = replicaStream(17, 0);
  auto w = walkExcursions(cfg, B1, B2, B3, st.steps);
  st.count = countRW(w.schedule, st.u, sites);
  const auto& R = w.schedule.R;
  st.returns = R.size();
  if (R.size() >= 2) {
    st.meanReturn = static_cast<double>(R.back() - R.front()) / static_cast<double>(R.size() - 1);
    st.M2 = static_cast<double>(sites) / st.meanReturn;
  }
  return st;
}

ChainSpec withReference(const ChainSpec& s, const std::vector<double>& mu) {
  if (mu.size() != s.size()) throw std::invalid_argument("withReference: size mismatch");
  ChainSpec t = s;
  t.mu = mu;
  const std::size_t n = s.size();
  for (auto& m : t.densities)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) m[a * n + b] *= s.mu[b] / mu[b];
  t.validate();
  return t;
}

SLTSuite sltSuite(std::size_t roundTrips, std::size_t lawRuns, std::size_t couplings, std::uint64_t seed) {
  SLTSuite out;
  Philox rng(seed, replicaStream(19, 0));
  // inverse then forward reproduces the chain and its marks
  for (std::size_t i = 0; i < roundTrips; ++i) {
    const std::size_t T = 1 + rng.below(50);
    auto spec = ChainSpec::random(5, 1 + rng.below(static_cast<std::uint32_t>(T)), rng);
    auto chain = sampleChain(spec, sampleInitial(spec, rng), T, rng);
    std::vector<double> xiHat(T);
    for (auto& x : xiHat) x = rng.exponential(1.0);
    auto eta0 = PoissonCloud::lazy(spec.mu, seed, replicaStream(23, i));
    auto eta = inverseSLT(spec, chain, xiHat, eta0, T);
    auto run = forwardSLT(spec, eta, chain[0], T);
    ++out.instances;
    if (run.chain != chain) {
      ++out.chainMismatches;
      continue;
    }
    auto G = softLocalTimes(spec, chain, xiHat, T);
    for (std::size_t k = 1; k <= T; ++k) {
      double g = spec.g(k, chain[k - 1], chain[k]);
      double err = std::abs(run.state.xi[k - 1] - xiHat[k - 1]) * g / std::max(1.0, G[k][chain[k]]);
      out.maxMarkError = std::max(out.maxMarkError, err);
    }
  }
  // law of (Z_1, Z_2) from a fixed start against the matrix product
  {
    auto spec = ChainSpec::random(4, 2, rng);
    const std::size_t n = 4, z0 = 0;
    auto P1 = spec.transition(1), P2 = spec.transition(2);
    std::vector<double> freq(n * n, 0);
    std::vector<double> xi1, xi2;
    for (std::size_t r = 0; r < lawRuns; ++r) {
      auto eta = PoissonCloud::lazy(spec.mu, seed, replicaStream(29, r));
      auto run = forwardSLT(spec, eta, z0, 2);
      freq[run.chain[1] * n + run.chain[2]] += 1;
      xi1.push_back(run.state.xi[0]);
      xi2.push_back(run.state.xi[1]);
    }
    double tv = 0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        tv += std::abs(freq[a * n + b] / static_cast<double>(lawRuns) - P1[z0 * n + a] * P2[a * n + b]);
    out.runs = lawRuns;
    out.tv = tv / 2;
    out.ksStep1 = ksTest(xi1, expCdf);
    out.ksStep2 = ksTest(xi2, expCdf);
  }
  // whenever the soft local times are sandwiched the ranges are nested
  for (std::size_t i = 0; i < couplings; ++i) {
    const std::size_t T = 1 + rng.below(30);
    auto spec = ChainSpec::random(4, 1 + rng.below(static_cast<std::uint32_t>(T)), rng);
    auto tilde = withReference(ChainSpec::random(4, 1 + rng.below(static_cast<std::uint32_t>(T)), rng), spec.mu);
    auto chain = sampleChain(spec, sampleInitial(spec, rng), T, rng);
    std::vector<double> xiHat(T);
    for (auto& x : xiHat) x = rng.exponential(1.0);
    auto eta0 = PoissonCloud::lazy(spec.mu, seed, replicaStream(31, i));
    auto res = coupleChains(spec, chain, xiHat, eta0, T, tilde, sampleInitial(tilde, rng));
    ++out.couplings;
    out.checked += res.report.checked;
    out.violations += res.report.violations;
  }
  return out;
}

} // namespace lp
