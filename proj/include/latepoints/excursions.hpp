#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "latepoints/interlacements.hpp"
#include "latepoints/lattice.hpp"
#include "latepoints/torus_walk.hpp"

namespace lp {

/// Return/departure schedule of a trace across the annulus B3 \ B2, with excursions
/// from the first hit of the inner boundary of B1 to the last visit of B2 before leaving B3.
struct ExcursionSchedule {
  std::uint64_t D0 = kNever;
  std::vector<std::uint64_t> R, D, H; // k = 1, 2, ...; D and H may be kNever
  std::vector<Point> entry, exit;     // clothesline pairs (x_{R_k}, x_{D_k}); exit empty while D_k is open
  std::vector<std::vector<Point>> ranges; // Z_k as a sorted site set; empty means Theta
  bool rangesStored = false;

  std::size_t returns() const { return R.size(); }
  // R_k < t
  std::size_t returnsBefore(std::uint64_t t) const;
  void writeCsv(std::ostream& os) const;
  // "" when D_k <= R_{k+1} <= D_{k+1}, clothesline points lie on their boundaries and Theta matches H
  std::string validate(const Box& B1, const Box& B2, const Box& B3) const;
};

/// Streaming construction of an ExcursionSchedule, one position at a time.
class ExcursionTracker {
public:
  ExcursionTracker(Box B1, Box B2, Box B3, bool storeRanges = false);
  void feed(std::uint64_t t, const int* x);
  const ExcursionSchedule& schedule() const { return s_; }
  ExcursionSchedule take() { return std::move(s_); }

private:
  enum class Phase { SeekD0, SeekReturn, InExcursion };
  Box b1_, b2_, b3_;
  bool store_;
  Phase phase_ = Phase::SeekD0;
  ExcursionSchedule s_;
  std::vector<Point> buffer_; // positions since H_k
  std::size_t lastB2_ = 0;     // buffer length up to the last visit of B2
};

/// Throws unless B1, B2, B3 share a centre and B1 <= B2 < B3 by side length.
void checkNesting(const Box& B1, const Box& B2, const Box& B3);

ExcursionSchedule excursionDecompose(const std::vector<Point>& trace, const Box& B1, const Box& B2, const Box& B3,
                                     bool storeRanges = true);

/// Representative of a torus point inside the box B4 of side N.
void liftToBox(const int* torusX, const Box& B4, int N, int d, int* out);

struct WalkExcursions {
  ExcursionSchedule schedule;
  std::uint64_t steps = 0;
  std::vector<std::uint64_t> entryCounts; // visits of X_{R_k} per inner-boundary site of B2 (k >= 1)
};

/// Torus walk lifted through B4 = Q(centre(B3), N) and decomposed until time `steps`.
WalkExcursions walkExcursions(const TorusConfig& cfg, const Box& B1, const Box& B2, const Box& B3, std::uint64_t steps,
                              bool storeRanges = false);

/// N_RW = sup{k >= 0 : R_k < u N^d}
std::uint64_t countRW(const ExcursionSchedule& s, double u, std::uint64_t sites);

struct RIExcursions {
  std::uint64_t total = 0;             // N_RI = sum_j T^j
  std::vector<std::uint64_t> perTraj;  // T^j
  std::int64_t trajectories = 0;
  std::int64_t neverEnteredB2 = 0;
  double truncationBiasBound = 0;
};

/// Samples interlacements from the equilibrium measure of `source` (which must surround B3)
/// and counts excursions across B3 \ B2 per trajectory.
RIExcursions riExcursions(const FiniteSet& source, const EquilibriumSampler& eq, const RIConfig& cfg, const Box& B1,
                          const Box& B2, const Box& B3);

struct TailPoint {
  double eps;
  double prob;     // P(|X - m| > eps m)
  double stderr_;  // binomial standard error
};

struct ConcentrationReport {
  double reference = 0; // m
  double mean = 0;
  double sd = 0;
  std::size_t samples = 0;
  std::vector<TailPoint> tail;
};

ConcentrationReport concentrationReport(const std::vector<double>& samples, double reference, const std::vector<double>& epsGrid);

} // namespace lp
