#include "latepoints/slt.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-14;
}

void ChainSpec::validate() const {
  const std::size_t n = mu.size();
  if (n == 0) throw std::invalid_argument("ChainSpec: empty state space");
  if (!states.empty() && states.size() != n) throw std::invalid_argument("ChainSpec: states and mu differ in length");
  for (double m : mu)
    if (!(m > 0)) throw std::invalid_argument("ChainSpec: mu must be positive");
  if (densities.empty()) throw std::invalid_argument("ChainSpec: no transition densities");
  for (std::size_t s = 0; s < densities.size(); ++s) {
    if (densities[s].size() != n * n) throw std::invalid_argument("ChainSpec: density matrix has the wrong size");
    for (std::size_t a = 0; a < n; ++a) {
      double row = 0;
      for (std::size_t b = 0; b < n; ++b) {
        double g = densities[s][a * n + b];
        if (g < 0 || !std::isfinite(g)) throw std::invalid_argument("ChainSpec: negative or non-finite density");
        row += g * mu[b];
      }
      if (std::abs(row - 1.0) > 1e-12)
        throw std::invalid_argument("ChainSpec: row " + std::to_string(a) + " of step " + std::to_string(s + 1) +
                                    " integrates to " + std::to_string(row));
    }
  }
  if (initial.size() != n) throw std::invalid_argument("ChainSpec: initial law has the wrong size");
  double t = 0;
  for (double p : initial) {
    if (p < 0) throw std::invalid_argument("ChainSpec: negative initial probability");
    t += p;
  }
  if (std::abs(t - 1.0) > 1e-12) throw std::invalid_argument("ChainSpec: initial law does not sum to one");
}

std::vector<double> ChainSpec::transition(std::size_t step) const {
  const std::size_t n = mu.size();
  std::vector<double> P(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) P[a * n + b] = g(step, a, b) * mu[b];
  return P;
}

ChainSpec ChainSpec::fromJson(const nlohmann::json& j) {
  ChainSpec s;
  s.mu = j.at("mu").get<std::vector<double>>();
  if (j.contains("states")) s.states = j.at("states").get<std::vector<std::string>>();
  else
    for (std::size_t i = 0; i < s.mu.size(); ++i) s.states.push_back("s" + std::to_string(i));
  s.densities = j.at("densities").get<std::vector<std::vector<double>>>();
  s.initial = j.at("initial").get<std::vector<double>>();
  s.validate();
  return s;
}

nlohmann::json ChainSpec::toJson() const {
  return nlohmann::json{{"states", states}, {"mu", mu}, {"densities", densities}, {"initial", initial}};
}

ChainSpec ChainSpec::random(std::size_t n, std::size_t steps, Philox& rng, double zeroFraction) {
  ChainSpec s;
  for (std::size_t i = 0; i < n; ++i) {
    s.states.push_back("s" + std::to_string(i));
    s.mu.push_back(0.5 + rng.uniform());
  }
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<double> m(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<double> w(n);
      double tot = 0;
      for (std::size_t b = 0; b < n; ++b) {
        w[b] = rng.uniform() < zeroFraction ? 0.0 : rng.uniform();
        tot += w[b];
      }
      if (tot == 0) {
        w[rng.below(static_cast<std::uint32_t>(n))] = 1.0;
        tot = 1.0;
      }
      for (std::size_t b = 0; b < n; ++b) m[a * n + b] = w[b] / tot / s.mu[b];
    }
    s.densities.push_back(std::move(m));
  }
  double tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.initial.push_back(rng.uniform());
    tot += s.initial.back();
  }
  for (auto& p : s.initial) p /= tot;
  s.validate();
  return s;
}

PoissonCloud PoissonCloud::lazy(const std::vector<double>& mu, std::uint64_t seed, std::uint64_t stream) {
  PoissonCloud c;
  c.mu_ = mu;
  c.explicit_.assign(mu.size(), {});
  c.hasTail_ = true;
  c.tailOffset_.assign(mu.size(), 0.0);
  c.tail_.assign(mu.size(), {});
  c.tailLast_.assign(mu.size(), 0.0);
  Philox base(seed, stream);
  for (std::size_t z = 0; z < mu.size(); ++z) c.tailRng_.push_back(base.split(z));
  return c;
}

PoissonCloud PoissonCloud::finite(const std::vector<double>& mu, std::vector<std::vector<double>> heights) {
  if (heights.size() != mu.size()) throw std::invalid_argument("PoissonCloud: one height list per state expected");
  PoissonCloud c;
  c.mu_ = mu;
  for (auto& h : heights) {
    for (double v : h)
      if (!(v >= 0)) throw std::invalid_argument("PoissonCloud: heights must be non-negative");
    std::sort(h.begin(), h.end());
  }
  c.explicit_ = std::move(heights);
  return c;
}

double PoissonCloud::at(std::size_t z, std::size_t idx) {
  const auto& e = explicit_[z];
  if (idx < e.size()) return e[idx];
  if (!hasTail_) return kInf;
  std::size_t j = idx - e.size();
  auto& t = tail_[z];
  while (t.size() <= j) {
    tailLast_[z] += tailRng_[z].exponential(mu_[z]);
    t.push_back(tailLast_[z]);
  }
  return tailOffset_[z] + t[j];
}

std::vector<double> PoissonCloud::below(std::size_t z, double V) {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    double v = at(z, i);
    if (v > V) break;
    out.push_back(v);
  }
  return out;
}

PoissonCloud PoissonCloud::raised(const std::vector<double>& shift) const {
  if (shift.size() != mu_.size()) throw std::invalid_argument("PoissonCloud::raised: shift has the wrong size");
  PoissonCloud c = *this;
  for (std::size_t z = 0; z < mu_.size(); ++z) {
    for (auto& v : c.explicit_[z]) v += shift[z];
    if (hasTail_) c.tailOffset_[z] += shift[z];
  }
  return c;
}

PoissonCloud PoissonCloud::withPoints(const std::vector<std::vector<double>>& extra) const {
  if (extra.size() != mu_.size()) throw std::invalid_argument("PoissonCloud::withPoints: one list per state expected");
  PoissonCloud c = *this;
  for (std::size_t z = 0; z < mu_.size(); ++z) {
    for (double v : extra[z]) {
      // the lazy tail must stay above every explicit point
      if (hasTail_ && v > tailOffset_[z]) throw std::invalid_argument("PoissonCloud::withPoints: point above the tail offset");
      c.explicit_[z].push_back(v);
    }
    std::sort(c.explicit_[z].begin(), c.explicit_[z].end());
  }
  return c;
}

SLTRun forwardSLT(const ChainSpec& spec, PoissonCloud& eta, std::size_t z0, std::size_t steps, bool keepHistory) {
  const std::size_t n = spec.size();
  if (eta.states() != n) throw std::invalid_argument("forwardSLT: cloud and spec differ in state count");
  if (z0 >= n) throw std::invalid_argument("forwardSLT: initial state out of range");
  SLTRun run;
  auto& st = run.state;
  st.nextLive.assign(n, 0);
  st.G.assign(n, 0.0);
  run.chain.push_back(z0);
  if (keepHistory) run.Ghistory.push_back(st.G);
  std::vector<double> low(n);
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t step = i + 1;
    const std::size_t cur = run.chain.back();
    double best = kInf, second = kInf, bestV = kInf;
    std::size_t bestZ = n;
    for (std::size_t z = 0; z < n; ++z) {
      low[z] = eta.at(z, st.nextLive[z]);
      double gz = spec.g(step, cur, z);
      if (gz <= 0 || !std::isfinite(low[z])) continue;
      double r = (low[z] - st.G[z]) / gz;
      if (r < best || (r == best && low[z] < bestV)) {
        second = best;
        best = r;
        bestV = low[z];
        bestZ = z;
      } else if (r < second) {
        second = r;
      }
    }
    if (bestZ == n) throw std::runtime_error("forwardSLT: no live point reachable (finite cloud exhausted)");
    if (second - best <= kTieTol * std::max(std::abs(best), 1e-300)) ++st.ties;
    const double xi = best;
    for (std::size_t z = 0; z < n; ++z) {
      double gz = spec.g(step, cur, z);
      if (gz <= 0) continue;
      st.G[z] += xi * gz;
      if (z != bestZ && st.G[z] >= low[z]) {
        // rounding at a near-tie; keep the live point strictly above the surface
        st.G[z] = std::nextafter(low[z], -kInf);
        ++st.ties;
      }
    }
    st.G[bestZ] = bestV;
    st.xi.push_back(xi);
    st.consumed.push_back({step, bestZ, bestV});
    ++st.nextLive[bestZ];
    run.chain.push_back(bestZ);
    if (keepHistory) run.Ghistory.push_back(st.G);
  }
  return run;
}

std::vector<std::vector<double>> softLocalTimes(const ChainSpec& spec, const std::vector<std::size_t>& chain,
                                                const std::vector<double>& xi, std::size_t T) {
  if (chain.size() < T + 1 || xi.size() < T) throw std::invalid_argument("softLocalTimes: chain or marks too short");
  const std::size_t n = spec.size();
  std::vector<std::vector<double>> G(T + 1, std::vector<double>(n, 0.0));
  for (std::size_t k = 1; k <= T; ++k)
    for (std::size_t z = 0; z < n; ++z) G[k][z] = G[k - 1][z] + xi[k - 1] * spec.g(k, chain[k - 1], z);
  return G;
}

std::string checkSLTInvariants(const ChainSpec& spec, PoissonCloud& eta, const SLTRun& run) {
  std::ostringstream err;
  const auto& st = run.state;
  const std::size_t steps = run.chain.size() - 1;
  const std::size_t n = spec.size();
  if (st.consumed.size() != steps || st.xi.size() != steps) err << "consumed count " << st.consumed.size() << " != steps " << steps << "; ";
  auto G = softLocalTimes(spec, run.chain, st.xi, steps);
  for (const auto& c : st.consumed) {
    double g = G[c.step][c.state];
    if (std::abs(c.v - g) > 1e-12 * std::max(1.0, std::abs(g)))
      err << "consumed point of step " << c.step << " off its surface by " << c.v - g << "; ";
  }
  std::vector<std::size_t> perState(n, 0);
  for (const auto& c : st.consumed) ++perState[c.state];
  for (std::size_t z = 0; z < n; ++z) {
    if (perState[z] != st.nextLive[z]) err << "state " << z << " consumed set is not a prefix; ";
    if (std::abs(st.G[z] - G[steps][z]) > 1e-12 * std::max(1.0, std::abs(G[steps][z])))
      err << "G recurrence broken at state " << z << "; ";
    if (!(eta.at(z, st.nextLive[z]) > st.G[z])) err << "live point at state " << z << " not above the surface; ";
    for (std::size_t i = 0; i < st.nextLive[z]; ++i)
      if (eta.at(z, i) > st.G[z]) err << "consumed point at state " << z << " above the surface; ";
  }
  return err.str();
}

namespace {
void checkLengths(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                  std::size_t T) {
  if (T == 0) throw std::invalid_argument("inverseSLT: T must be at least 1");
  if (chain.size() != T + 1) throw std::invalid_argument("inverseSLT: chain must hold Z_0..Z_T");
  if (xiHat.size() != T) throw std::invalid_argument("inverseSLT: exactly T exponential marks expected");
  for (auto z : chain)
    if (z >= spec.size()) throw std::invalid_argument("inverseSLT: state out of range");
  for (std::size_t k = 1; k <= T; ++k)
    if (!(spec.g(k, chain[k - 1], chain[k]) > 0)) throw std::invalid_argument("inverseSLT: chain uses a zero-density step");
}
} // namespace

PoissonCloud inverseSLT(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                        const PoissonCloud& etaHat0, std::size_t T) {
  checkLengths(spec, chain, xiHat, T);
  auto G = softLocalTimes(spec, chain, xiHat, T);
  std::vector<std::vector<double>> pts(spec.size());
  for (std::size_t j = 1; j <= T; ++j) pts[chain[j]].push_back(G[j][chain[j]]);
  return etaHat0.raised(G[T]).withPoints(pts);
}

PoissonCloud inverseSLTLiteral(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                               PoissonCloud etaHat0, std::size_t T) {
  checkLengths(spec, chain, xiHat, T);
  const std::size_t n = spec.size();
  PoissonCloud eta = std::move(etaHat0);
  for (std::size_t k = 0; k < T; ++k) {
    const std::size_t j = T - k;
    std::vector<double> shift(n);
    for (std::size_t z = 0; z < n; ++z) shift[z] = xiHat[j - 1] * spec.g(j, chain[j - 1], z);
    std::vector<std::vector<double>> pt(n);
    pt[chain[j]].push_back(shift[chain[j]]);
    eta = eta.raised(shift).withPoints(pt);
  }
  return eta;
}

SandwichCheck sandwichCheck(const std::vector<std::vector<double>>& G, const std::vector<std::vector<double>>& Gt,
                            const std::vector<std::size_t>& chain, const std::vector<std::size_t>& chainTilde, std::size_t p,
                            std::size_t m, std::size_t n) {
  SandwichCheck c{p, m, n, true, true};
  for (std::size_t z = 0; z < G[m].size(); ++z)
    if (!(Gt[p][z] <= G[m][z] && G[m][z] <= Gt[n][z])) c.sandwich = false;
  std::set<std::size_t> rz(chain.begin() + 1, chain.begin() + m + 1);
  std::set<std::size_t> rtp(chainTilde.begin() + 1, chainTilde.begin() + p + 1);
  std::set<std::size_t> rtn(chainTilde.begin() + 1, chainTilde.begin() + n + 1);
  c.inclusion = std::includes(rz.begin(), rz.end(), rtp.begin(), rtp.end()) &&
                std::includes(rtn.begin(), rtn.end(), rz.begin(), rz.end());
  return c;
}

CoupleResult coupleChains(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                          const PoissonCloud& etaHat0, std::size_t T, const ChainSpec& specTilde, std::size_t zTilde0,
                          const std::vector<std::array<std::size_t, 3>>& triples) {
  if (spec.mu != specTilde.mu) throw std::invalid_argument("coupleChains: both specs must share the reference measure");
  CoupleResult r;
  r.eta = inverseSLT(spec, chain, xiHat, etaHat0, T);
  r.original = forwardSLT(spec, r.eta, chain[0], T, true);
  r.tilde = forwardSLT(specTilde, r.eta, zTilde0, T, true);
  r.G = softLocalTimes(spec, chain, xiHat, T);
  r.Gt = r.tilde.Ghistory;
  const auto& ct = r.tilde.chain;
  auto& rep = r.report;
  rep.pMax.assign(T + 1, 0);
  rep.nMin.assign(T + 1, 0);
  const std::size_t n = spec.size();
  auto leq = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t z = 0; z < n; ++z)
      if (!(a[z] <= b[z])) return false;
    return true;
  };
  for (std::size_t m = 1; m <= T; ++m) {
    for (std::size_t p = T; p >= 1; --p)
      if (leq(r.Gt[p], r.G[m])) {
        rep.pMax[m] = p;
        break;
      }
    for (std::size_t q = 1; q <= T; ++q)
      if (leq(r.G[m], r.Gt[q])) {
        rep.nMin[m] = q;
        break;
      }
    std::set<std::size_t> rz(chain.begin() + 1, chain.begin() + m + 1);
    if (rep.pMax[m] > 0) {
      std::set<std::size_t> rt(ct.begin() + 1, ct.begin() + rep.pMax[m] + 1);
      ++rep.checked;
      if (!std::includes(rz.begin(), rz.end(), rt.begin(), rt.end())) ++rep.violations;
    }
    if (rep.nMin[m] > 0) {
      std::set<std::size_t> rt(ct.begin() + 1, ct.begin() + rep.nMin[m] + 1);
      ++rep.checked;
      if (!std::includes(rt.begin(), rt.end(), rz.begin(), rz.end())) ++rep.violations;
    }
  }
  for (const auto& t : triples) {
    if (t[0] < 1 || t[1] < 1 || t[2] < 1 || t[0] > T || t[1] > T || t[2] > T)
      throw std::invalid_argument("coupleChains: p, m, n must lie in 1..T");
    auto c = sandwichCheck(r.G, r.Gt, chain, ct, t[0], t[1], t[2]);
    if (c.sandwich) {
      ++rep.checked;
      if (!c.inclusion) ++rep.violations;
    }
    rep.requested.push_back(c);
  }
  return r;
}

std::size_t sampleInitial(const ChainSpec& spec, Philox& rng) {
  double u = rng.uniform();
  for (std::size_t z = 0; z < spec.size(); ++z) {
    u -= spec.initial[z];
    if (u <= 0) return z;
  }
  return spec.size() - 1;
}

std::vector<std::size_t> sampleChain(const ChainSpec& spec, std::size_t z0, std::size_t steps, Philox& rng) {
  std::vector<std::size_t> c{z0};
  const std::size_t n = spec.size();
  for (std::size_t k = 1; k <= steps; ++k) {
    double u = rng.uniform();
    std::size_t next = n;
    std::size_t lastPositive = 0;
    for (std::size_t z = 0; z < n; ++z) {
      double p = spec.g(k, c.back(), z) * spec.mu[z];
      if (p > 0) lastPositive = z;
      u -= p;
      if (u <= 0 && p > 0) {
        next = z;
        break;
      }
    }
    c.push_back(next == n ? lastPositive : next);
  }
  return c;
}

} // namespace lp
