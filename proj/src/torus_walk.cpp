#include "latepoints/torus_walk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latepoints/potential.hpp"

namespace lp {

Torus::Torus(int N, int d, std::uint64_t maxSites) : N_(N), d_(d) {
  if (N < 2) throw std::invalid_argument("Torus: N must be at least 2");
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("Torus: unsupported dimension");
  double vol = std::pow(static_cast<double>(N), d);
  if (vol > static_cast<double>(maxSites))
    throw std::invalid_argument("Torus: N^d = " + std::to_string(vol) + " exceeds the site cap");
  sites_ = 1;
  for (int k = d - 1; k >= 0; --k) {
    stride_[k] = sites_;
    sites_ *= static_cast<std::uint64_t>(N);
  }
}

std::uint64_t Torus::index(const int* x) const {
  std::uint64_t i = 0;
  for (int k = 0; k < d_; ++k) {
    int c = ((x[k] % N_) + N_) % N_;
    i += static_cast<std::uint64_t>(c) * stride_[k];
  }
  return i;
}

void Torus::coords(std::uint64_t idx, int* x) const {
  for (int k = 0; k < d_; ++k) {
    x[k] = static_cast<int>(idx / stride_[k]);
    idx %= stride_[k];
  }
}

std::vector<int> Torus::coords(std::uint64_t idx) const {
  std::vector<int> x(d_);
  coords(idx, x.data());
  return x;
}

std::uint64_t Torus::neighbour(std::uint64_t idx, int k, int sign) const {
  int c = static_cast<int>((idx / stride_[k]) % N_);
  int nc = (c + sign + N_) % N_;
  return idx + (static_cast<std::int64_t>(nc) - c) * static_cast<std::int64_t>(stride_[k]);
}

TorusWalker::TorusWalker(const TorusConfig& cfg)
    : torus_(cfg.N, cfg.d, cfg.maxSites), N_(cfg.N), d_(cfg.d), rng_(cfg.seed, cfg.stream) {
  for (int k = 0; k < d_; ++k) x_[k] = static_cast<int>(rng_.below(static_cast<std::uint32_t>(N_)));
  site_ = torus_.index(x_.data());
}

std::uint64_t LocalTimeField::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

double AlphaField::alpha(std::uint64_t x) const {
  if (firstHit[x] == kNever) return std::numeric_limits<double>::infinity();
  double nd = static_cast<double>(firstHit.size());
  return static_cast<double>(firstHit[x]) / (g0 * nd * std::log(nd));
}

std::uint64_t AlphaField::coverTime() const {
  std::uint64_t m = 0;
  for (auto h : firstHit) {
    if (h == kNever) return kNever;
    m = std::max(m, h);
  }
  return m;
}

WalkResult runWalk(const TorusConfig& cfg, std::uint64_t horizonSteps, bool recordCounts) {
  TorusWalker w(cfg);
  const auto n = w.torus().sites();
  WalkResult r;
  r.local.config = cfg;
  r.local.steps = horizonSteps;
  r.alpha.config = cfg;
  r.alpha.horizon = horizonSteps;
  r.alpha.g0 = greenAtOrigin(cfg.d);
  r.alpha.firstHit.assign(n, kNever);
  if (recordCounts) r.local.counts.assign(n, 0);
  auto& hit = r.alpha.firstHit;
  auto* counts = recordCounts ? r.local.counts.data() : nullptr;
  bool sat = false;
  auto visit = [&](std::uint64_t s, std::uint64_t t) {
    if (hit[s] == kNever) hit[s] = t;
    if (counts) {
      if (counts[s] == std::numeric_limits<std::uint32_t>::max())
        sat = true;
      else
        ++counts[s];
    }
  };
  visit(w.site(), 0);
  for (std::uint64_t t = 1; t <= horizonSteps; ++t) {
    w.step();
    visit(w.site(), t);
  }
  r.local.saturated = sat;
  return r;
}

std::uint64_t coverTime(const TorusConfig& cfg) {
  TorusWalker w(cfg);
  const auto n = w.torus().sites();
  const double g0 = greenAtOrigin(cfg.d);
  const double nd = static_cast<double>(n);
  const auto guard = static_cast<std::uint64_t>(100.0 * g0 * nd * std::log(nd)) + 100;
  std::vector<std::uint64_t> seen((n + 63) / 64, 0);
  std::uint64_t left = n;
  auto mark = [&](std::uint64_t s) {
    auto& word = seen[s >> 6];
    std::uint64_t bit = 1ULL << (s & 63);
    if (!(word & bit)) {
      word |= bit;
      --left;
    }
  };
  mark(w.site());
  while (left > 0) {
    if (w.time() >= guard) throw std::runtime_error("coverTime: safety horizon exceeded");
    w.step();
    mark(w.site());
  }
  return w.time();
}

double uScale(double alpha, double cardF, double g0) {
  if (cardF < 2) throw std::invalid_argument("uScale: |F| must be at least 2");
  return alpha * g0 * std::log(cardF);
}

std::uint64_t lateThreshold(double u, std::uint64_t sites) {
  return static_cast<std::uint64_t>(std::floor(u * static_cast<double>(sites)));
}

LateSet lateSet(const AlphaField& field, double alpha, const std::vector<std::uint64_t>& F) {
  const auto n = static_cast<std::uint64_t>(field.firstHit.size());
  LateSet L;
  L.alpha = alpha;
  L.u = uScale(alpha, static_cast<double>(F.empty() ? n : F.size()), field.g0);
  L.threshold = lateThreshold(L.u, n);
  if (L.threshold > field.horizon)
    throw std::runtime_error("lateSet: walk horizon " + std::to_string(field.horizon) + " is shorter than floor(u N^d) = " +
                             std::to_string(L.threshold));
  if (F.empty()) {
    for (std::uint64_t x = 0; x < n; ++x)
      if (field.firstHit[x] > L.threshold) L.members.push_back(x);
  } else {
    for (auto x : F)
      if (field.firstHit[x] > L.threshold) L.members.push_back(x);
    std::sort(L.members.begin(), L.members.end());
    L.members.erase(std::unique(L.members.begin(), L.members.end()), L.members.end());
  }
  return L;
}

LateSet lateSetDirect(const TorusConfig& cfg, double alpha, double g0) {
  TorusWalker w(cfg);
  const auto n = w.torus().sites();
  LateSet L;
  L.alpha = alpha;
  L.u = uScale(alpha, static_cast<double>(n), g0);
  L.threshold = lateThreshold(L.u, n);
  std::vector<std::uint64_t> seen((n + 63) / 64, 0);
  seen[w.site() >> 6] |= 1ULL << (w.site() & 63);
  for (std::uint64_t t = 1; t <= L.threshold; ++t) {
    w.step();
    seen[w.site() >> 6] |= 1ULL << (w.site() & 63);
  }
  for (std::uint64_t x = 0; x < n; ++x)
    if (!(seen[x >> 6] & (1ULL << (x & 63)))) L.members.push_back(x);
  return L;
}

std::vector<LateSet> lateSetsDirect(const TorusConfig& cfg, const std::vector<double>& alphas, double g0) {
  TorusWalker w(cfg);
  const auto n = w.torus().sites();
  std::vector<LateSet> out(alphas.size());
  std::vector<std::size_t> order(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out[i].alpha = alphas[i];
    out[i].u = uScale(alphas[i], static_cast<double>(n), g0);
    out[i].threshold = lateThreshold(out[i].u, n);
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return out[a].threshold < out[b].threshold; });
  std::vector<std::uint64_t> seen((n + 63) / 64, 0);
  seen[w.site() >> 6] |= 1ULL << (w.site() & 63);
  for (auto i : order) {
    while (w.time() < out[i].threshold) {
      w.step();
      seen[w.site() >> 6] |= 1ULL << (w.site() & 63);
    }
    for (std::uint64_t x = 0; x < n; ++x)
      if (!(seen[x >> 6] & (1ULL << (x & 63)))) out[i].members.push_back(x);
  }
  return out;
}

AlphaField runUntilCover(const TorusConfig& cfg, std::uint64_t markTime) {
  TorusWalker w(cfg);
  const auto n = w.torus().sites();
  AlphaField f;
  f.config = cfg;
  f.g0 = greenAtOrigin(cfg.d);
  f.firstHit.assign(n, kNever);
  const double nd = static_cast<double>(n);
  const auto guard = static_cast<std::uint64_t>(100.0 * f.g0 * nd * std::log(nd)) + 100;
  std::uint64_t left = n - 1;
  f.firstHit[w.site()] = 0;
  f.markTime = markTime;
  if (markTime == 0) f.markSite = w.site();
  while (left > 0) {
    if (w.time() >= guard) throw std::runtime_error("runUntilCover: safety horizon exceeded");
    w.step();
    if (w.time() == markTime) f.markSite = w.site();
    auto& h = f.firstHit[w.site()];
    if (h == kNever) {
      h = w.time();
      --left;
    }
  }
  f.horizon = w.time();
  return f;
}

} // namespace lp
