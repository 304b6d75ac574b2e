#include "latepoints/interlacements.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "latepoints/torus_walk.hpp"

namespace lp {

void EquilibriumSampler::buildAlias() {
  std::vector<double> w(mass_.begin(), mass_.end());
  for (double x : w)
    if (x < 0) throw std::runtime_error("EquilibriumSampler: negative equilibrium mass");
  alias_ = boost::random::discrete_distribution<std::size_t, double>(w.begin(), w.end());
  radius_ = 0;
  for (const auto& p : points_) radius_ = std::max(radius_, supNorm(p));
}

EquilibriumSampler EquilibriumSampler::forSet(const FiniteSet& K, const GreenTable& table) {
  auto c = capacity(K, table);
  EquilibriumSampler s;
  s.points_ = K.points;
  s.mass_ = c.equilibrium;
  // masses at interior points are solver noise
  for (auto& m : s.mass_)
    if (std::abs(m) < 1e-12) m = 0;
  s.cap_ = c.cap;
  s.interiorResidual_ = c.residual;
  s.buildAlias();
  return s;
}

EquilibriumSampler EquilibriumSampler::forBox(const Box& B, const GreenTable& table) {
  const int d = B.dim();
  FiniteSet boundary(d, B.innerBoundary());
  auto c = capacity(boundary, table);
  EquilibriumSampler s;
  s.points_ = boundary.points;
  s.mass_ = c.equilibrium;
  s.cap_ = c.cap;
  double res = c.residual;
  for (const auto& x : B.sites()) {
    if (B.onInnerBoundary(x.data())) continue;
    double h = 0;
    for (std::size_t i = 0; i < s.points_.size(); ++i) h += table.g(sub(x, s.points_[i])) * s.mass_[i];
    res = std::max(res, std::abs(h - 1.0));
  }
  s.interiorResidual_ = res;
  if (res > 1e-10) throw std::runtime_error("EquilibriumSampler: interior residual of boundary solve above 1e-10");
  s.buildAlias();
  return s;
}

std::size_t EquilibriumSampler::sample(Philox& rng) const { return alias_(rng); }

double EquilibriumSampler::hitProbabilityFar(const int* x, int d) const {
  double s = 0;
  std::array<double, kMaxDim> diff{};
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (mass_[i] == 0) continue;
    for (int k = 0; k < d; ++k) diff[k] = x[k] - points_[i][k];
    s += mass_[i] * greenAsymptotic(diff.data(), d);
  }
  return s;
}

std::size_t EquilibriumSampler::sampleEntryFar(const int* x, int d, Philox& rng) const {
  std::vector<double> w(points_.size());
  std::array<double, kMaxDim> diff{};
  double total = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (mass_[i] == 0) continue;
    for (int k = 0; k < d; ++k) diff[k] = x[k] - points_[i][k];
    w[i] = mass_[i] * greenAsymptotic(diff.data(), d);
    total += w[i];
  }
  double r = rng.uniform() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    r -= w[i];
    if (r <= 0 && w[i] > 0) return i;
  }
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0) return i;
  throw std::runtime_error("sampleEntryFar: empty support");
}

double truncationBias(const EquilibriumSampler& eq, int truncationRadius, Truncation mode, int d) {
  // closest a point just outside the truncation box can be to the support
  double s = truncationRadius + 1 - eq.radius();
  if (s < 1) throw std::invalid_argument("truncationBias: truncation radius must exceed the box radius");
  std::vector<double> axis(d, 0.0);
  axis[0] = s;
  double gfar = 1.05 * greenAsymptotic(axis.data(), d);
  double killBias = eq.cap() * gfar;
  if (mode == Truncation::Kill) return killBias;
  double ratio = (eq.radius() + 1.0) / s;
  return killBias * ratio * ratio;
}

RISample sampleRI(const FiniteSet& B, const EquilibriumSampler& eq, const RIConfig& cfg,
                  const std::function<void(std::int64_t, double, const int*, bool)>& observer) {
  const int d = B.d;
  if (d > kMaxDim) throw std::invalid_argument("sampleRI: dimension too large");
  if (cfg.u < 0) throw std::invalid_argument("sampleRI: negative level");
  if (cfg.truncationRadius < 2 * eq.radius()) throw std::invalid_argument("sampleRI: truncation radius below twice the box radius");
  RISample s;
  s.region = B;
  s.u = cfg.u;
  s.truncationRadius = cfg.truncationRadius;
  s.mode = cfg.mode == Truncation::Kill ? "kill" : "reinject";
  s.truncationBiasBound = truncationBias(eq, cfg.truncationRadius, cfg.mode, d);
  if (s.truncationBiasBound > cfg.biasTolerance && !cfg.acceptBias)
    throw std::runtime_error("sampleRI: truncation bias bound " + std::to_string(s.truncationBiasBound) +
                             " exceeds tolerance; enlarge the radius or accept the bias explicitly");

  // region lookup through its bounding box
  Point lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = hi[k] = B.points.front()[k];
    for (const auto& p : B.points) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  std::vector<std::int64_t> ext(d);
  std::int64_t vol = 1;
  for (int k = 0; k < d; ++k) {
    ext[k] = hi[k] - lo[k] + 1;
    vol *= ext[k];
  }
  std::vector<std::int32_t> lookup(static_cast<std::size_t>(vol), -1);
  auto boxIndex = [&](const int* x) -> std::int64_t {
    std::int64_t i = 0;
    for (int k = 0; k < d; ++k) {
      if (x[k] < lo[k] || x[k] > hi[k]) return -1;
      i = i * ext[k] + (x[k] - lo[k]);
    }
    return i;
  };
  for (std::size_t i = 0; i < B.size(); ++i) lookup[boxIndex(B.points[i].data())] = static_cast<std::int32_t>(i);
  // start points must belong to the region
  std::vector<std::int32_t> startIndex(eq.points().size());
  for (std::size_t i = 0; i < eq.points().size(); ++i) {
    auto bi = boxIndex(eq.points()[i].data());
    if (bi < 0 || lookup[bi] < 0) throw std::invalid_argument("sampleRI: equilibrium support outside the region");
    startIndex[i] = lookup[bi];
  }

  s.localTimes.assign(B.size(), 0);
  s.firstLevel.assign(B.size(), std::numeric_limits<double>::infinity());

  Philox master(cfg.seed, cfg.stream);
  std::poisson_distribution<std::int64_t> pois(cfg.u * eq.cap());
  s.trajCount = cfg.u > 0 ? pois(master) : 0;
  s.labels.resize(static_cast<std::size_t>(s.trajCount));
  for (auto& l : s.labels) l = cfg.u * (1.0 - master.uniform());
  std::sort(s.labels.begin(), s.labels.end());

  const int R = cfg.truncationRadius;
  std::array<int, kMaxDim> x{};
  for (std::int64_t j = 0; j < s.trajCount; ++j) {
    Philox rng = master.split(static_cast<std::uint64_t>(j));
    const double label = s.labels[j];
    auto visit = [&](std::int32_t idx) {
      ++s.localTimes[idx];
      if (label < s.firstLevel[idx]) s.firstLevel[idx] = label;
    };
    std::size_t e = eq.sample(rng);
    for (int k = 0; k < d; ++k) x[k] = eq.points()[e][k];
    visit(startIndex[e]);
    if (observer) observer(j, label, x.data(), false);
    for (;;) {
      std::uint32_t r = rng.below(static_cast<std::uint32_t>(2 * d));
      int k = static_cast<int>(r >> 1);
      x[k] += (r & 1u) ? 1 : -1;
      ++s.steps;
      if (x[k] > R || x[k] < -R) {
        if (cfg.mode == Truncation::Kill) break;
        if (rng.uniform() >= eq.hitProbabilityFar(x.data(), d)) break;
        e = eq.sampleEntryFar(x.data(), d, rng);
        for (int c = 0; c < d; ++c) x[c] = eq.points()[e][c];
        ++s.reinjections;
        visit(startIndex[e]);
        if (observer) observer(j, label, x.data(), true);
        continue;
      }
      auto bi = boxIndex(x.data());
      if (bi >= 0 && lookup[bi] >= 0) visit(lookup[bi]);
      if (observer) observer(j, label, x.data(), false);
    }
  }
  return s;
}

double vacantProbability(const FiniteSet& K, double u, const GreenTable& table) {
  if (u < 0) throw std::invalid_argument("vacantProbability: negative level");
  if (u == 0) return 1.0;
  return std::exp(-u * capacity(K, table).cap);
}

RILateSet lateSetRI(const RISample& s, double alpha, double cardF, double g0, const std::vector<Point>& F) {
  RILateSet L;
  L.alpha = alpha;
  L.u = alpha > 0 ? uScale(alpha, cardF, g0) : 0.0;
  if (L.u > s.u) throw std::invalid_argument("lateSetRI: level exceeds the sampled level");
  if (F.empty()) {
    for (std::size_t i = 0; i < s.region.size(); ++i)
      if (s.vacant(i, L.u)) L.members.push_back(s.region.points[i]);
  } else {
    for (const auto& p : F) {
      auto it = std::lower_bound(s.region.points.begin(), s.region.points.end(), p);
      if (it == s.region.points.end() || *it != p) throw std::invalid_argument("lateSetRI: F must lie in the region");
      if (s.vacant(static_cast<std::size_t>(it - s.region.points.begin()), L.u)) L.members.push_back(p);
    }
  }
  return L;
}

} // namespace lp
