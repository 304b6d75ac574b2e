#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latepoints/lattice.hpp"
#include "latepoints/potential.hpp"
#include "latepoints/torus_walk.hpp"

namespace lp {

/// Sorted torus site indices.
using SiteSet = std::vector<std::uint64_t>;

/// Offsets of the box Q(0, r) = [-floor((r-1)/2), ceil((r-1)/2)]^d for real r >= 1.
std::pair<int, int> boxOffsets(double r);

/// Canonical representative under translations and the 2^d d! lattice symmetries.
FiniteSet canonicalForm(const FiniteSet& K);
/// Distinct images of K under the lattice symmetries, each translated to its min corner.
std::vector<FiniteSet> symmetryImages(const FiniteSet& K);

struct PatternShape {
  FiniteSet set; // canonical
  double cap = 0;
  double alphaStar = 0; // 1/(g(0) cap)
};

PatternShape makeShape(const FiniteSet& K, const GreenTable& table);

/// Adjacent pairs inside S, each edge counted once (torus wraparound).
std::uint64_t doublePoints(const SiteSet& S, const Torus& T);
/// Adjacent pairs inside a subset of Z^d.
std::uint64_t doublePoints(const FiniteSet& S);
/// Number of x with x + K contained in S (translates only).
std::uint64_t patternCount(const SiteSet& S, const Torus& T, const FiniteSet& K);
/// Sum of patternCount over the symmetry images of K.
std::uint64_t patternCountAllImages(const SiteSet& S, const Torus& T, const FiniteSet& K);

/// Independent site marks U_x; sites with U_x <= pmax are generated by geometric skipping and
/// carry U_x uniform on [0, pmax]. realize(p) for p <= pmax is then {x : U_x <= p}, nested in p.
struct BernoulliField {
  std::uint64_t sites = 0;
  double pmax = 0;
  SiteSet site;
  std::vector<double> mark;
  SiteSet realize(double p) const;
};

BernoulliField bernoulliField(std::uint64_t sites, double pmax, std::uint64_t seed, std::uint64_t stream = 0);
/// |F|^{-alpha}, the late-point density at level alpha.
double bernoulliDensity(double alpha, double cardF);

struct Placement {
  std::size_t shape;
  std::uint64_t anchor;
  double mark;
};

/// Union of shape placements anchor + K, each kept when its mark is below the shape's probability.
struct PatternField {
  std::vector<FiniteSet> shapes;
  std::vector<double> pmax;
  std::vector<Placement> placements;
  int N = 0, d = 0;
  SiteSet realize(const std::vector<double>& p) const;
};

/// Every shape (pass all images separately) is placed at every anchor with independent marks.
PatternField buildPatternBernoulli(const std::vector<FiniteSet>& shapes, const std::vector<double>& pmax, const Torus& T,
                                   std::uint64_t seed);

/// Symmetry classes with alpha_*(A) > alphaStarFloor and l-infinity diameter <= diameterCap.
/// Needs alphaStarFloor >= 1/2; at exactly 1/2 the diameter cap must be finite.
std::vector<PatternShape> enumeratePatterns(int d, double alphaStarFloor, double diameterCap,
                                            const GreenParams& params = GreenParams{});

struct PFEstimate {
  double p = 0;
  double se = 0;
  std::size_t replicas = 0;
  double upper = 0; // |F|^{-alpha g(0) cap(K)}
  double lower = 0; // upper minus the one-point-larger terms over Q(K,R) \ K
  double R = 0;
  std::string warning;
};

/// Isolated occurrences: x with S intersected with Q(x+K, R) equal to x+K.
std::uint64_t isolatedOccurrences(const SiteSet& S, const Torus& T, const FiniteSet& K, double R);
/// Random-walk estimate of p^alpha(K) = P(L^alpha intersected with Q(K, R_F) = K) with its RI brackets.
PFEstimate estimatePFAlpha(const FiniteSet& K, int N, int d, double alpha, std::size_t replicas, std::uint64_t seed);
/// The closed-form interlacement brackets alone.
void pfBrackets(const FiniteSet& K, double cardF, double alpha, double R, PFEstimate& out);

struct ChenSteinResult {
  double alpha = 0, epsilon = 0, R = 0;
  double cardF = 0;
  std::size_t neighbourhood = 0; // |N_x|
  std::vector<double> alphas, b1, b2;
  double couplingTerm = 0; // d_eps(Y,Z) |S|^2 supplied by the caller
  double bound = 0;        // 400 sup (b1 + b2) + couplingTerm
};

/// Singleton field over the whole torus with N_x = {y : |y - x|_inf <= R}.
ChenSteinResult chenSteinBounds(double alpha, double epsilon, int N, int d, double R, double couplingTerm = 0);

/// Sites x of S for which S intersected with Q(x, R) is neither empty nor an admissible
/// pattern of diameter at most RF.
SiteSet separationCheck(const SiteSet& S, const Torus& T, double R, double RF);

struct KSResult {
  std::size_t n = 0;
  double D = 0;
  double p = 1;
  std::string verdict; // pass, fail, inconclusive
};

/// Kolmogorov p-value with Stephens' small-sample correction.
double kolmogorovPValue(double D, std::size_t n);
KSResult ksTest(std::vector<double> samples, double (*cdf)(double), double pThreshold = 0.01, std::size_t minSamples = 50);
double expCdf(double x);

/// (alpha_x - alpha_*) d log N for late points at alpha_* with no other such point in Q(x, 2R),
/// leaving out the box Q(X_{t*}, 2R) around the walker when the field recorded it at t*.
std::vector<double> expLawSamples(const AlphaField& field, double alphaStar, double R);
KSResult expLawTest(const std::vector<double>& pooled, double pThreshold = 0.01);

struct PoissonPPResult {
  int cellsPerSide = 0;
  std::size_t points = 0;
  double mean = 0;
  double chi2 = 0;
  int df = 0;
  double p = 1;
  std::string verdict;
};

/// Cell counts over cellsPerSide^d congruent boxes against Poisson with matched mean.
/// Cells are merged (halving cellsPerSide) while the expected count is below 1.
PoissonPPResult poissonPPTest(const SiteSet& S, const Torus& T, int cellsPerSide, double pThreshold = 0.01);

struct ScalingFit {
  std::vector<double> Ns, means, ses;
  double theory = 0;
  double slope = 0, lo = 0, hi = 0;
  bool fitted = false;
  std::string verdict; // fitted, subcritical
};

/// log-log regression of mean counts on N with a replica bootstrap CI.
/// With alpha above alpha_*(K) no slope is fitted; the verdict is "subcritical".
ScalingFit scalingFit(const std::vector<double>& Ns, const std::vector<std::vector<double>>& samples, double alpha,
                      double alphaStarK, int d, std::size_t bootstrap = 2000, std::uint64_t seed = 1);

} // namespace lp
