#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "latepoints/rng.hpp"

namespace lp {

/// Time-inhomogeneous Markov chain on a finite state space with densities relative to mu.
/// Step i (i >= 1) uses densities[min(i, size) - 1], so a single matrix gives a homogeneous chain.
struct ChainSpec {
  std::vector<std::string> states;
  std::vector<double> mu;
  std::vector<std::vector<double>> densities; // row-major n x n, g(prev, next)
  std::vector<double> initial;

  std::size_t size() const { return mu.size(); }
  double g(std::size_t step, std::size_t from, std::size_t to) const {
    const auto& m = densities[std::min(step, densities.size()) - 1];
    return m[from * mu.size() + to];
  }
  // throws unless every row integrates to one against mu within 1e-12
  void validate() const;
  // transition probability matrix of a step, P(a,b) = g(a,b) mu(b)
  std::vector<double> transition(std::size_t step) const;

  static ChainSpec fromJson(const nlohmann::json& j);
  nlohmann::json toJson() const;
  // random spec with strictly positive mu; a fraction of entries is zeroed
  static ChainSpec random(std::size_t n, std::size_t steps, Philox& rng, double zeroFraction = 0.2);
};

/// Poisson point process on states x R_+ with intensity mu (x) dv. Each state holds an
/// explicit sorted list of heights, optionally followed by a lazily generated stream
/// of rate mu(z) shifted by a per-state offset.
class PoissonCloud {
public:
  PoissonCloud() = default;
  static PoissonCloud lazy(const std::vector<double>& mu, std::uint64_t seed, std::uint64_t stream = 0);
  static PoissonCloud finite(const std::vector<double>& mu, std::vector<std::vector<double>> heights);

  std::size_t states() const { return mu_.size(); }
  const std::vector<double>& mu() const { return mu_; }
  bool hasTail() const { return hasTail_; }
  // idx-th lowest height at state z, +inf past the end of a finite cloud
  double at(std::size_t z, std::size_t idx);
  // all heights at z that are <= V
  std::vector<double> below(std::size_t z, double V);
  std::size_t explicitCount(std::size_t z) const { return explicit_[z].size(); }

  // new cloud: the given points are added, then the whole cloud is raised by shift(z)
  PoissonCloud raised(const std::vector<double>& shift) const;
  PoissonCloud withPoints(const std::vector<std::vector<double>>& extra) const;

private:
  std::vector<double> mu_;
  std::vector<std::vector<double>> explicit_;
  bool hasTail_ = false;
  std::vector<double> tailOffset_;
  std::vector<Philox> tailRng_;
  std::vector<std::vector<double>> tail_; // generated, unshifted
  std::vector<double> tailLast_;
};

struct ConsumedPoint {
  std::size_t step;
  std::size_t state;
  double v;
};

struct SLTState {
  std::vector<std::size_t> nextLive; // per state: index of the lowest unconsumed point
  std::vector<ConsumedPoint> consumed;
  std::vector<double> xi;  // xi_1 .. xi_i
  std::vector<double> G;   // per state
  std::size_t ties = 0;    // infima attained twice within 1e-14 relative
};

struct SLTRun {
  std::vector<std::size_t> chain; // z_0 .. z_steps
  SLTState state;
  std::vector<std::vector<double>> Ghistory; // G_0 .. G_steps when requested
};

/// Soft local times: xi_{i+1} = min over live points of (v - G_i(z)) / g_{i+1}(z_i, z).
SLTRun forwardSLT(const ChainSpec& spec, PoissonCloud& eta, std::size_t z0, std::size_t steps, bool keepHistory = false);

/// Checks the geometric invariants of a run against its cloud; returns an empty string when all hold.
std::string checkSLTInvariants(const ChainSpec& spec, PoissonCloud& eta, const SLTRun& run);

/// Inverse soft local times in closed form: the point of step j sits at (Z_j, G_j(Z_j)),
/// and etaHat0 is raised by G_T.
PoissonCloud inverseSLT(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                        const PoissonCloud& etaHat0, std::size_t T);
/// The same map by T literal shift-and-add stages on a finite realization.
PoissonCloud inverseSLTLiteral(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                               PoissonCloud etaHat0, std::size_t T);

/// G_i(z) = sum_{k <= i} xi_k g_k(Z_{k-1}, z) for i = 0..T.
std::vector<std::vector<double>> softLocalTimes(const ChainSpec& spec, const std::vector<std::size_t>& chain,
                                                const std::vector<double>& xi, std::size_t T);

struct SandwichCheck {
  std::size_t p = 0, m = 0, n = 0;
  bool sandwich = false;  // Gt_p <= G_m <= Gt_n pointwise
  bool inclusion = false; // ranges nested accordingly
};

struct InclusionReport {
  std::vector<SandwichCheck> requested;
  // per m: largest p with Gt_p <= G_m (0 if none) and smallest n with G_m <= Gt_n (0 if none)
  std::vector<std::size_t> pMax, nMin;
  std::size_t checked = 0;
  std::size_t violations = 0; // sandwich held but inclusion failed
};

struct CoupleResult {
  PoissonCloud eta;
  SLTRun tilde;
  SLTRun original; // forward run of the original spec on eta, reproduces the input chain
  std::vector<std::vector<double>> G, Gt;
  InclusionReport report;
};

CoupleResult coupleChains(const ChainSpec& spec, const std::vector<std::size_t>& chain, const std::vector<double>& xiHat,
                          const PoissonCloud& etaHat0, std::size_t T, const ChainSpec& specTilde, std::size_t zTilde0,
                          const std::vector<std::array<std::size_t, 3>>& triples = {});

SandwichCheck sandwichCheck(const std::vector<std::vector<double>>& G, const std::vector<std::vector<double>>& Gt,
                            const std::vector<std::size_t>& chain, const std::vector<std::size_t>& chainTilde, std::size_t p,
                            std::size_t m, std::size_t n);

/// Draws a chain path of the given length directly from the transition matrices.
std::vector<std::size_t> sampleChain(const ChainSpec& spec, std::size_t z0, std::size_t steps, Philox& rng);
std::size_t sampleInitial(const ChainSpec& spec, Philox& rng);

} // namespace lp
