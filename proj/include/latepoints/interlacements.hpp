#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/random/discrete_distribution.hpp>

#include "latepoints/lattice.hpp"
#include "latepoints/potential.hpp"
#include "latepoints/rng.hpp"

namespace lp {

/// Normalised equilibrium measure of a finite set with an alias table for O(1) draws.
class EquilibriumSampler {
public:
  EquilibriumSampler() = default;
  // full |K| x |K| solve
  static EquilibriumSampler forSet(const FiniteSet& K, const GreenTable& table);
  // boundary-only solve for a box; interior residual of G e = 1 is checked
  static EquilibriumSampler forBox(const Box& B, const GreenTable& table);

  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& mass() const { return mass_; } // e_B(y)
  double cap() const { return cap_; }
  double interiorResidual() const { return interiorResidual_; }
  int radius() const { return radius_; } // sup-norm radius of the support around the origin
  std::size_t sample(Philox& rng) const;

  // P_x(H_B < infty) = sum_y g(x-y) e_B(y), Green's function from its large-|x| expansion
  double hitProbabilityFar(const int* x, int d) const;
  // entry point drawn proportional to e_B(y) g(x-y)
  std::size_t sampleEntryFar(const int* x, int d, Philox& rng) const;

private:
  void buildAlias();
  std::vector<Point> points_;
  std::vector<double> mass_;
  boost::random::discrete_distribution<std::size_t, double> alias_;
  double cap_ = 0;
  double interiorResidual_ = 0;
  int radius_ = 0;
};

enum class Truncation { Kill, Reinject };

struct RIConfig {
  double u = 1.0;            // level; trajectories carry labels uniform in (0, u]
  int truncationRadius = 40; // trajectories are handled once |x|_inf exceeds this
  Truncation mode = Truncation::Reinject;
  double biasTolerance = 1e-4;
  bool acceptBias = false;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

/// Observer of one trajectory: called on every position (reinjection jumps included).
using TrajectoryVisitor = std::function<void(const int* x, bool reinjected)>;

struct RISample {
  FiniteSet region; // the set B the trajectories are started from
  double u = 0;
  std::int64_t trajCount = 0;
  std::vector<double> labels;          // per trajectory, sorted ascending
  std::vector<std::uint32_t> localTimes; // per region point at level u
  std::vector<double> firstLevel;      // per region point: smallest label visiting it, +inf if none
  int truncationRadius = 0;
  double truncationBiasBound = 0;
  std::string mode;
  std::int64_t reinjections = 0;
  std::int64_t steps = 0;

  // vacant at level v <= u
  bool vacant(std::size_t regionIndex, double v) const { return firstLevel[regionIndex] > v; }
};

/// Estimated per-trajectory bias of the truncation, as reported with every sample.
double truncationBias(const EquilibriumSampler& eq, int truncationRadius, Truncation mode, int d);

/// Poisson(u cap(B)) trajectories from the normalised equilibrium measure of B.
/// The observer, when given, sees every trajectory position in Z^d.
RISample sampleRI(const FiniteSet& B, const EquilibriumSampler& eq, const RIConfig& cfg,
                  const std::function<void(std::int64_t traj, double label, const int* x, bool reinjected)>& observer = {});

/// exp(-u cap(K)), the exact vacancy law.
double vacantProbability(const FiniteSet& K, double u, const GreenTable& table);

struct RILateSet {
  double alpha = 0;
  double u = 0;
  std::vector<Point> members;
};

/// Vacant set of a sample at level u_F(alpha) intersected with F (defaults to the sample region).
RILateSet lateSetRI(const RISample& s, double alpha, double cardF, double g0, const std::vector<Point>& F = {});

} // namespace lp
