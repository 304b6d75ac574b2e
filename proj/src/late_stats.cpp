#include "latepoints/late_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace lp {

namespace {

bool inSet(const SiteSet& S, std::uint64_t x) { return std::binary_search(S.begin(), S.end(), x); }

std::uint64_t shifted(const Torus& T, std::uint64_t site, const int* off) {
  std::array<int, kMaxDim> x{};
  T.coords(site, x.data());
  for (int k = 0; k < T.d(); ++k) x[k] += off[k];
  return T.index(x.data());
}

// all offsets of a box [lo, hi]^d
std::vector<Point> boxPoints(int d, int lo, int hi) {
  std::vector<Point> out;
  Point p(d, lo);
  for (;;) {
    out.push_back(p);
    int k = d - 1;
    while (k >= 0 && p[k] == hi) p[k--] = lo;
    if (k < 0) break;
    ++p[k];
  }
  return out;
}

FiniteSet toMinCorner(const FiniteSet& K) {
  Point m = K.points.front();
  for (const auto& p : K.points)
    for (int k = 0; k < K.d; ++k) m[k] = std::min(m[k], p[k]);
  for (auto& v : m) v = -v;
  return K.translated(m);
}

bool connectedTriplesAdmissible(int d) {
  static std::mutex mu;
  static std::map<int, bool> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  bool v = classifyAdmissible(d).connectedTriplesAdmissible;
  cache[d] = v;
  return v;
}

double logCardF(int N, int d) { return d * std::log(static_cast<double>(N)); }

} // namespace

std::pair<int, int> boxOffsets(double r) {
  if (r < 1) throw std::invalid_argument("boxOffsets: side length below 1");
  return {-static_cast<int>(std::floor((r - 1) / 2)), static_cast<int>(std::ceil((r - 1) / 2))};
}

std::vector<FiniteSet> symmetryImages(const FiniteSet& K) {
  const int d = K.d;
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::vector<Point>> seen;
  std::vector<FiniteSet> out;
  do {
    for (int signs = 0; signs < (1 << d); ++signs) {
      std::vector<Point> pts;
      for (const auto& p : K.points) {
        Point q(d);
        for (int k = 0; k < d; ++k) q[k] = ((signs >> k) & 1) ? -p[perm[k]] : p[perm[k]];
        pts.push_back(q);
      }
      FiniteSet img = toMinCorner(FiniteSet(d, pts));
      if (seen.insert(img.points).second) out.push_back(img);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

FiniteSet canonicalForm(const FiniteSet& K) {
  auto imgs = symmetryImages(K);
  return *std::min_element(imgs.begin(), imgs.end(),
                           [](const FiniteSet& a, const FiniteSet& b) { return a.points < b.points; });
}

PatternShape makeShape(const FiniteSet& K, const GreenTable& table) {
  PatternShape s;
  s.set = canonicalForm(K);
  s.cap = capacity(s.set, table).cap;
  s.alphaStar = 1.0 / (table.g0() * s.cap);
  return s;
}

std::uint64_t doublePoints(const SiteSet& S, const Torus& T) {
  std::uint64_t c = 0;
  for (auto x : S)
    for (int k = 0; k < T.d(); ++k)
      if (inSet(S, T.neighbour(x, k, +1))) ++c;
  return c;
}

std::uint64_t doublePoints(const FiniteSet& S) {
  std::uint64_t c = 0;
  for (const auto& p : S.points)
    for (int k = 0; k < S.d; ++k) {
      Point q = p;
      ++q[k];
      if (S.contains(q)) ++c;
    }
  return c;
}

std::uint64_t patternCount(const SiteSet& S, const Torus& T, const FiniteSet& K) {
  if (K.empty()) throw std::invalid_argument("patternCount: empty shape");
  if (supDiameter(K) >= T.N()) throw std::invalid_argument("patternCount: shape does not fit in the torus (capacity is infinite)");
  std::vector<Point> rel;
  for (const auto& p : K.points) rel.push_back(sub(p, K.points.front()));
  std::uint64_t c = 0;
  std::set<std::uint64_t> anchors;
  for (auto s : S) {
    // anchor the first shape point on s
    bool ok = true;
    for (std::size_t i = 1; i < rel.size() && ok; ++i) ok = inSet(S, shifted(T, s, rel[i].data()));
    if (ok) ++c;
  }
  return c;
}

std::uint64_t patternCountAllImages(const SiteSet& S, const Torus& T, const FiniteSet& K) {
  std::uint64_t c = 0;
  for (const auto& img : symmetryImages(K)) c += patternCount(S, T, img);
  return c;
}

SiteSet BernoulliField::realize(double p) const {
  if (p > pmax * (1 + 1e-12)) throw std::invalid_argument("BernoulliField::realize: p above the generated maximum");
  SiteSet out;
  for (std::size_t i = 0; i < site.size(); ++i)
    if (mark[i] <= p) out.push_back(site[i]);
  return out;
}

BernoulliField bernoulliField(std::uint64_t sites, double pmax, std::uint64_t seed, std::uint64_t stream) {
  if (pmax < 0 || pmax > 1) throw std::invalid_argument("bernoulliField: density outside [0,1]");
  BernoulliField f;
  f.sites = sites;
  f.pmax = pmax;
  if (pmax == 0) return f;
  Philox rng(seed, stream);
  if (pmax == 1) {
    for (std::uint64_t x = 0; x < sites; ++x) {
      f.site.push_back(x);
      f.mark.push_back(rng.uniform());
    }
    return f;
  }
  const double lq = std::log1p(-pmax);
  std::uint64_t x = 0;
  for (;;) {
    double gap = std::floor(std::log(rng.uniform()) / lq);
    if (gap >= static_cast<double>(sites - x)) break;
    x += static_cast<std::uint64_t>(gap);
    f.site.push_back(x);
    f.mark.push_back(pmax * rng.uniform());
    if (++x >= sites) break;
  }
  return f;
}

double bernoulliDensity(double alpha, double cardF) { return std::pow(cardF, -alpha); }

SiteSet PatternField::realize(const std::vector<double>& p) const {
  if (p.size() != shapes.size()) throw std::invalid_argument("PatternField::realize: one probability per shape");
  Torus T(N, d);
  SiteSet out;
  for (const auto& pl : placements) {
    if (p[pl.shape] > pmax[pl.shape] * (1 + 1e-12)) throw std::invalid_argument("PatternField::realize: p above pmax");
    if (pl.mark > p[pl.shape]) continue;
    for (const auto& q : shapes[pl.shape].points) out.push_back(shifted(T, pl.anchor, q.data()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PatternField buildPatternBernoulli(const std::vector<FiniteSet>& shapes, const std::vector<double>& pmax, const Torus& T,
                                   std::uint64_t seed) {
  if (shapes.size() != pmax.size()) throw std::invalid_argument("buildPatternBernoulli: one probability per shape");
  PatternField f;
  f.shapes = shapes;
  f.pmax = pmax;
  f.N = T.N();
  f.d = T.d();
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    if (supDiameter(shapes[s]) >= T.N()) throw std::invalid_argument("buildPatternBernoulli: shape does not fit in the torus");
    auto b = bernoulliField(T.sites(), pmax[s], seed, s);
    for (std::size_t i = 0; i < b.site.size(); ++i) f.placements.push_back({s, b.site[i], b.mark[i]});
  }
  return f;
}

std::vector<PatternShape> enumeratePatterns(int d, double alphaStarFloor, double diameterCap, const GreenParams& params) {
  if (alphaStarFloor < 0.5) throw std::invalid_argument("enumeratePatterns: floors below 1/2 admit infinite families");
  const double g0 = greenAtOrigin(d);
  // pairs {0,x}: alpha_*(pair) > floor  <=>  g(x) > g0 (2 floor - 1)
  const double gMin = g0 * (2 * alphaStarFloor - 1);
  int radius;
  if (gMin > 0) {
    // g(x) <= 1.1 a_d |x|_inf^{2-d} bounds the pair range
    double r = std::pow(1.1 * greenLeadingConstant(d) / gMin, 1.0 / (d - 2));
    radius = static_cast<int>(std::ceil(r)) + 1;
    if (std::isfinite(diameterCap)) radius = std::min(radius, static_cast<int>(std::floor(diameterCap)));
  } else {
    if (!std::isfinite(diameterCap)) throw std::invalid_argument("enumeratePatterns: floor 1/2 needs a finite diameter cap");
    radius = static_cast<int>(std::floor(diameterCap));
  }
  radius = std::max(radius, 2);
  auto table = GreenTable::build(d, radius, params);
  std::vector<PatternShape> out;
  out.push_back(makeShape(FiniteSet(d, {Point(d, 0)}), table));
  const double capLimit = 1.0 / (g0 * alphaStarFloor);
  for (const auto& kv : table.values()) {
    const auto& key = kv.first;
    if (std::all_of(key.begin(), key.end(), [](int v) { return v == 0; })) continue;
    Point x(key.begin(), key.end());
    if (supNorm(x) > diameterCap) continue;
    FiniteSet pair(d, {Point(d, 0), x});
    double cap = 2.0 / (g0 + kv.second.value);
    if (cap < capLimit) {
      PatternShape s;
      s.set = canonicalForm(pair);
      s.cap = cap;
      s.alphaStar = 1.0 / (g0 * cap);
      out.push_back(s);
    }
  }
  // triples: only the connected ones can be admissible
  if (connectedTriplesAdmissible(d) && diameterCap >= 2) {
    for (const auto& K : {shapeK1(d), shapeK2(d)}) {
      auto s = makeShape(K, table);
      if (s.cap < capLimit && supDiameter(s.set) <= diameterCap) out.push_back(s);
    }
  }
  return out;
}

std::uint64_t isolatedOccurrences(const SiteSet& S, const Torus& T, const FiniteSet& K, double R) {
  auto [lo, hi] = boxOffsets(R);
  const int d = T.d();
  // neighbourhood of K relative to its first point
  std::set<Point> hood;
  auto box = boxPoints(d, lo, hi);
  for (const auto& p : K.points)
    for (const auto& o : box) hood.insert(sub(add(p, o), K.points.front()));
  std::set<Point> rel;
  for (const auto& p : K.points) rel.insert(sub(p, K.points.front()));
  std::uint64_t c = 0;
  for (auto s : S) {
    bool ok = true;
    for (const auto& r : rel)
      if (!inSet(S, shifted(T, s, r.data()))) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (const auto& h : hood) {
      if (rel.count(h)) continue;
      if (inSet(S, shifted(T, s, h.data()))) {
        ok = false;
        break;
      }
    }
    if (ok) ++c;
  }
  return c;
}

void pfBrackets(const FiniteSet& K, double cardF, double alpha, double R, PFEstimate& out) {
  const int d = K.d;
  auto [lo, hi] = boxOffsets(R);
  const int radius = supDiameter(K) + std::max(-lo, hi) + 1;
  auto table = GreenTable::build(d, radius);
  const double g0 = table.g0();
  const double capK = capacity(K, table).cap;
  out.upper = std::pow(cardF, -alpha * g0 * capK);
  std::set<Point> extra;
  auto box = boxPoints(d, lo, hi);
  for (const auto& p : K.points)
    for (const auto& o : box) {
      Point q = add(p, o);
      if (!K.contains(q)) extra.insert(q);
    }
  double s = 0;
  for (const auto& q : extra) {
    auto pts = K.points;
    pts.push_back(q);
    s += std::pow(cardF, -alpha * g0 * capacity(FiniteSet(d, pts), table).cap);
  }
  out.lower = out.upper - s;
  out.R = R;
}

PFEstimate estimatePFAlpha(const FiniteSet& K, int N, int d, double alpha, std::size_t replicas, std::uint64_t seed) {
  if (replicas < 2) throw std::invalid_argument("estimatePFAlpha: at least two replicas");
  PFEstimate est;
  const double cardF = std::pow(static_cast<double>(N), d);
  const double R = std::pow(std::log(cardF), 1.0 / (d - 2));
  Torus T(N, d);
  const double g0 = greenAtOrigin(d);
  std::vector<double> vals;
  for (std::size_t r = 0; r < replicas; ++r) {
    TorusConfig cfg;
    cfg.N = N;
    cfg.d = d;
    cfg.seed = seed;
    cfg.stream = r;
    auto L = lateSetDirect(cfg, alpha, g0);
    vals.push_back(static_cast<double>(isolatedOccurrences(L.members, T, K, R)) / cardF);
  }
  double m = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(replicas);
  double v = 0;
  for (double x : vals) v += (x - m) * (x - m);
  v /= static_cast<double>(replicas - 1);
  est.p = m;
  est.se = std::sqrt(v / static_cast<double>(replicas));
  est.replicas = replicas;
  pfBrackets(K, cardF, alpha, R, est);
  if (m == 0) est.warning = "no isolated occurrence observed; increase replicas or lower alpha";
  else if (est.se > 0.3 * m) est.warning = "standard error above 30% of the estimate";
  return est;
}

ChenSteinResult chenSteinBounds(double alpha, double epsilon, int N, int d, double R, double couplingTerm) {
  ChenSteinResult r;
  r.alpha = alpha;
  r.epsilon = epsilon;
  r.R = R;
  r.couplingTerm = couplingTerm;
  r.cardF = std::pow(static_cast<double>(N), d);
  const int rad = static_cast<int>(std::floor(R));
  if (2 * rad + 1 > N) throw std::invalid_argument("chenSteinBounds: neighbourhood wraps the torus");
  r.neighbourhood = static_cast<std::size_t>(std::pow(2 * rad + 1, d));
  auto table = GreenTable::build(d, std::max(rad, 1));
  const double g0 = table.g0();
  // multiplicity of each symmetry class inside the neighbourhood
  std::vector<std::pair<double, double>> classes; // (g(y), count)
  for (const auto& kv : table.values()) {
    const auto& key = kv.first;
    if (key.front() == 0) continue; // origin
    if (key.front() > rad) continue;
    // number of points with this sorted absolute-value key
    std::map<int, int> mult;
    for (int v : key) ++mult[v];
    double count = 1;
    for (int i = 2; i <= d; ++i) count *= i;
    for (const auto& m : mult)
      for (int i = 2; i <= m.second; ++i) count /= i;
    for (int v : key)
      if (v != 0) count *= 2;
    classes.push_back({kv.second.value, count});
  }
  for (double a : {alpha - 2 * epsilon, alpha}) {
    const double p = std::pow(r.cardF, -a);
    const double b1 = r.cardF * static_cast<double>(r.neighbourhood) * p * p;
    double b2 = 0;
    for (const auto& [g, count] : classes) b2 += count * std::pow(r.cardF, -a * g0 * 2.0 / (g0 + g));
    b2 *= r.cardF;
    r.alphas.push_back(a);
    r.b1.push_back(b1);
    r.b2.push_back(b2);
  }
  double sup = 0;
  for (std::size_t i = 0; i < r.b1.size(); ++i) sup = std::max(sup, r.b1[i] + r.b2[i]);
  r.bound = 400 * sup + couplingTerm;
  return r;
}

SiteSet separationCheck(const SiteSet& S, const Torus& T, double R, double RF) {
  const int d = T.d();
  auto [lo, hi] = boxOffsets(R);
  auto box = boxPoints(d, lo, hi);
  const bool triplesOk = connectedTriplesAdmissible(d);
  SiteSet bad;
  for (auto x : S) {
    std::vector<Point> local;
    for (const auto& o : box)
      if (inSet(S, shifted(T, x, o.data()))) local.push_back(o);
    FiniteSet P(d, local);
    bool ok;
    if (P.size() <= 2) ok = true;
    else if (P.size() == 3) ok = triplesOk && isConnected(P);
    else ok = false;
    if (ok && supDiameter(P) > RF) ok = false;
    if (!ok) bad.push_back(x);
  }
  return bad;
}

double kolmogorovPValue(double D, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * D;
  if (lambda < 0.2) return 1.0;
  double s = 0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2 * s, 0.0, 1.0);
}

double expCdf(double x) { return x <= 0 ? 0.0 : -std::expm1(-x); }

KSResult ksTest(std::vector<double> samples, double (*cdf)(double), double pThreshold, std::size_t minSamples) {
  KSResult r;
  r.n = samples.size();
  if (samples.empty()) {
    r.verdict = "inconclusive";
    return r;
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double D = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    D = std::max({D, (i + 1) / n - F, F - i / n});
  }
  r.D = D;
  r.p = kolmogorovPValue(D, samples.size());
  if (samples.size() < minSamples) r.verdict = "inconclusive";
  else r.verdict = r.p > pThreshold ? "pass" : "fail";
  return r;
}

std::vector<double> expLawSamples(const AlphaField& field, double alphaStar, double R) {
  const auto& cfg = field.config;
  Torus T(cfg.N, cfg.d, cfg.maxSites);
  const auto n = T.sites();
  const double u = uScale(alphaStar, static_cast<double>(n), field.g0);
  const auto thr = lateThreshold(u, n);
  if (thr > field.horizon) throw std::invalid_argument("expLawSamples: field horizon is shorter than the alpha_* threshold");
  SiteSet late;
  for (std::uint64_t x = 0; x < n; ++x)
    if (field.firstHit[x] > thr) late.push_back(x);
  auto [lo, hi] = boxOffsets(2 * R);
  auto box = boxPoints(cfg.d, lo, hi);
  const double scale = cfg.d * std::log(static_cast<double>(cfg.N));
  // sites within Q(X_{t*}, 2R) of the walker are left out when its position is known
  std::set<std::uint64_t> nearWalker;
  if (field.markTime == thr && field.markSite != kNever)
    for (const auto& o : box) nearWalker.insert(shifted(T, field.markSite, o.data()));
  std::vector<double> out;
  for (auto x : late) {
    if (nearWalker.count(x)) continue;
    bool iso = true;
    for (const auto& o : box) {
      if (std::all_of(o.begin(), o.end(), [](int v) { return v == 0; })) continue;
      if (inSet(late, shifted(T, x, o.data()))) {
        iso = false;
        break;
      }
    }
    if (!iso) continue;
    if (field.firstHit[x] == kNever) throw std::runtime_error("expLawSamples: an isolated late point was never hit; run to cover");
    out.push_back((field.alpha(x) - alphaStar) * scale);
  }
  return out;
}

KSResult expLawTest(const std::vector<double>& pooled, double pThreshold) { return ksTest(pooled, expCdf, pThreshold, 50); }

namespace {
// Poisson classes {0}, {1}, ... merged upward until each expected count reaches 1; the last class is a tail.
std::vector<int> poissonClasses(double lambda, double cells, int maxCount) {
  std::vector<int> starts{0};
  double acc = 0;
  double pk = std::exp(-lambda);
  double cdf = 0;
  for (int k = 0; k <= maxCount + 1; ++k) {
    acc += pk * cells;
    cdf += pk;
    if (acc >= 1.0 && (1 - cdf) * cells >= 1.0) {
      starts.push_back(k + 1);
      acc = 0;
    }
    pk *= lambda / (k + 1);
  }
  return starts;
}

double chiSquare(const std::vector<int>& counts, const std::vector<int>& starts, double lambda, double cells) {
  const int classes = static_cast<int>(starts.size());
  std::vector<double> obs(classes, 0), expct(classes, 0);
  for (int c : counts) {
    int cls = static_cast<int>(std::upper_bound(starts.begin(), starts.end(), c) - starts.begin()) - 1;
    obs[cls] += 1;
  }
  boost::math::poisson_distribution<double> pois(lambda);
  for (int i = 0; i < classes; ++i) {
    double lo = starts[i] == 0 ? 0.0 : boost::math::cdf(pois, starts[i] - 1);
    double hi = i + 1 < classes ? boost::math::cdf(pois, starts[i + 1] - 1) : 1.0;
    expct[i] = (hi - lo) * cells;
  }
  double chi = 0;
  for (int i = 0; i < classes; ++i) chi += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
  return chi;
}
} // namespace

PoissonPPResult poissonPPTest(const SiteSet& S, const Torus& T, int cellsPerSide, double pThreshold) {
  const int N = T.N(), d = T.d();
  if (cellsPerSide < 1 || N % cellsPerSide) throw std::invalid_argument("poissonPPTest: cells per side must divide N");
  PoissonPPResult r;
  r.points = S.size();
  int c = cellsPerSide;
  while (c > 1 && static_cast<double>(S.size()) / std::pow(c, d) < 1.0 && N % (c / 2) == 0) c /= 2;
  r.cellsPerSide = c;
  const auto cells = static_cast<std::size_t>(std::pow(c, d));
  r.mean = static_cast<double>(S.size()) / static_cast<double>(cells);
  auto cellOf = [&](std::uint64_t site) {
    std::array<int, kMaxDim> x{};
    T.coords(site, x.data());
    std::size_t idx = 0;
    for (int k = 0; k < d; ++k) idx = idx * c + static_cast<std::size_t>(x[k] * c / N);
    return idx;
  };
  std::vector<int> counts(cells, 0);
  for (auto s : S) ++counts[cellOf(s)];
  if (S.empty()) {
    r.verdict = "inconclusive";
    return r;
  }
  int maxCount = *std::max_element(counts.begin(), counts.end());
  auto starts = poissonClasses(r.mean, static_cast<double>(cells), std::max(maxCount, 20));
  r.df = static_cast<int>(starts.size()) - 2;
  r.chi2 = chiSquare(counts, starts, r.mean, static_cast<double>(cells));
  if (r.df < 1) {
    r.verdict = "inconclusive";
    return r;
  }
  // conditional on the number of points, cell counts are multinomial; calibrate by simulation
  Philox rng(0x5eed, S.size());
  const int sims = 2000;
  int ge = 0;
  std::vector<int> sc(cells);
  for (int s = 0; s < sims; ++s) {
    std::fill(sc.begin(), sc.end(), 0);
    for (std::size_t i = 0; i < S.size(); ++i) ++sc[rng.below(static_cast<std::uint32_t>(cells))];
    if (chiSquare(sc, starts, r.mean, static_cast<double>(cells)) >= r.chi2 - 1e-12) ++ge;
  }
  r.p = (ge + 1.0) / (sims + 1.0);
  r.verdict = r.p > pThreshold ? "pass" : "fail";
  return r;
}

ScalingFit scalingFit(const std::vector<double>& Ns, const std::vector<std::vector<double>>& samples, double alpha,
                      double alphaStarK, int d, std::size_t bootstrap, std::uint64_t seed) {
  if (Ns.size() < 3 || samples.size() != Ns.size()) throw std::invalid_argument("scalingFit: need at least three N values");
  ScalingFit f;
  f.Ns = Ns;
  f.theory = d * (1 - alpha / alphaStarK);
  auto meanOf = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  for (const auto& s : samples) {
    double m = meanOf(s);
    double var = 0;
    for (double x : s) var += (x - m) * (x - m);
    var /= std::max<std::size_t>(1, s.size() - 1);
    f.means.push_back(m);
    f.ses.push_back(std::sqrt(var / static_cast<double>(s.size())));
  }
  if (alpha >= alphaStarK) {
    f.verdict = "subcritical";
    return f;
  }
  if (std::all_of(f.means.begin(), f.means.end(), [](double m) { return m == 0; }))
    throw std::runtime_error("scalingFit: zero counts at every N; use a smaller alpha");
  auto slopeOf = [&](const std::vector<double>& means) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < Ns.size(); ++i)
      if (means[i] > 0) {
        x.push_back(std::log(Ns[i]));
        y.push_back(std::log(means[i]));
      }
    if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double mx = meanOf(x), my = meanOf(y), sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
  };
  f.slope = slopeOf(f.means);
  Philox rng(seed, 0xb007);
  std::vector<double> slopes;
  std::vector<double> bm(Ns.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (std::size_t i = 0; i < Ns.size(); ++i) {
      const auto& s = samples[i];
      double acc = 0;
      for (std::size_t j = 0; j < s.size(); ++j) acc += s[rng.below(static_cast<std::uint32_t>(s.size()))];
      bm[i] = acc / static_cast<double>(s.size());
    }
    double sl = slopeOf(bm);
    if (std::isfinite(sl)) slopes.push_back(sl);
  }
  std::sort(slopes.begin(), slopes.end());
  if (!slopes.empty()) {
    f.lo = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
    f.hi = slopes[static_cast<std::size_t>(0.975 * (slopes.size() - 1))];
  }
  f.fitted = true;
  f.verdict = "fitted";
  return f;
}

} // namespace lp
