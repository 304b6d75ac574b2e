#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latepoints/excursions.hpp"
#include "latepoints/interlacements.hpp"
#include "latepoints/late_stats.hpp"
#include "latepoints/slt.hpp"

namespace lp {

// Replica r of an experiment always uses stream (tag << 40) | r, whatever the thread count.
inline std::uint64_t replicaStream(std::uint64_t tag, std::uint64_t r) { return (tag << 40) | r; }

struct VacancyCell {
  std::string shape;
  double u = 0;
  std::size_t replicas = 0, vacant = 0;
  double p = 0, exact = 0, se = 0, z = 0;
};

struct VacancyStudy {
  FiniteSet region;
  int truncationRadius = 0;
  double truncationBias = 0;
  std::vector<VacancyCell> cells;
};

/// Interlacements from the equilibrium measure of the box Q(0, regionSide) at the largest u;
/// smaller levels are read off the trajectory labels. Each shape is centred in the box.
VacancyStudy vacancyStudy(const std::vector<std::pair<std::string, FiniteSet>>& shapes, const std::vector<double>& us,
                          std::size_t replicas, int regionSide, int truncationRadius, std::uint64_t seed, int jobs);

struct PhaseCell {
  double alpha = 0;
  int N = 0;
  std::size_t replicas = 0;
  double meanD = 0, se = 0, meanLate = 0;
  std::vector<double> D;
};

struct PhaseStudy {
  int d = 3;
  std::vector<PhaseCell> cells; // alpha-major
  std::vector<ScalingFit> fits;  // one per alpha
};

PhaseStudy phaseStudy(const std::vector<int>& Ns, const std::vector<double>& alphas, int d, std::size_t replicas,
                      std::uint64_t seed, int jobs);

struct Figure1Data {
  int N = 0, d = 0;
  double alpha = 0;
  std::uint64_t seed = 0, stream = 0;
  SiteSet late, bernoulli;
  std::uint64_t lateDouble = 0, bernoulliDouble = 0;
};

/// Late set of one walk and a Bernoulli field of density |F|^{-alpha} on the same torus.
Figure1Data figure1Data(int N, int d, double alpha, std::uint64_t seed, std::uint64_t stream);

struct ExpLawStudy {
  int N = 0, d = 0;
  double alphaStar = 0, R = 0;
  std::vector<double> pooled;
  std::vector<std::size_t> perSeed;
  double mean = 0;
  KSResult ks;
};

ExpLawStudy expLawStudy(int N, int d, std::size_t seeds, std::uint64_t seed, int jobs);

struct PoissonStudy {
  double alpha = 0;
  int N = 0;
  std::vector<PoissonPPResult> results;
  std::size_t passes = 0;
};

std::vector<PoissonStudy> poissonStudy(int N, int d, const std::vector<double>& alphas, std::size_t seeds, int cellsPerSide,
                                       std::uint64_t seed, int jobs);

struct RIExcursionStudy {
  double u = 0, M = 0;
  std::vector<double> samples; // N_RI per sample
  double mean = 0, se = 0;
  double truncationBias = 0;
  std::int64_t trajectories = 0;
};

/// N_RI(B2, B3, u) with B_i = Q(0, r_i), trajectories started from the equilibrium measure of Q(0, sourceSide).
RIExcursionStudy riExcursionStudy(int r1, int r2, int r3, int sourceSide, double u, int truncationRadius,
                                  std::size_t samples, std::uint64_t seed, int jobs);

struct RWExcursionStudy {
  int N = 0;
  double u = 0, M = 0, M2 = 0;
  std::uint64_t count = 0; // N_RW
  std::uint64_t steps = 0;
  std::size_t returns = 0;
  double meanReturn = 0;
};

/// One torus walk with u = targetUM / cap_{B3}(B2); M2 = N^d / mean(R_{k+1} - R_k).
RWExcursionStudy rwExcursionStudy(int N, int r1, int r2, int r3, double targetUM, std::uint64_t seed);

struct SLTSuite {
  // round trip
  std::size_t instances = 0, chainMismatches = 0;
  double maxMarkError = 0; // |xi - xiHat| g / max(1, G)
  // two-step law
  std::size_t runs = 0;
  double tv = 0;
  KSResult ksStep1, ksStep2;
  // inclusion implication
  std::size_t couplings = 0, checked = 0, violations = 0;
};

/// Same transition probabilities expressed as densities against another reference measure.
ChainSpec withReference(const ChainSpec& s, const std::vector<double>& mu);

SLTSuite sltSuite(std::size_t roundTrips, std::size_t lawRuns, std::size_t couplings, std::uint64_t seed);

} // namespace lp
