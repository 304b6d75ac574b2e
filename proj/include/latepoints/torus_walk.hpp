#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "latepoints/rng.hpp"

namespace lp {

inline constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
inline constexpr int kMaxDim = 8;

struct TorusConfig {
  int N = 16;
  int d = 3;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  std::uint64_t maxSites = 1000000000ULL;
};

/// Geometry of (Z/NZ)^d with row-major site indices.
class Torus {
public:
  Torus(int N, int d, std::uint64_t maxSites = 1000000000ULL);
  int N() const { return N_; }
  int d() const { return d_; }
  std::uint64_t sites() const { return sites_; }
  std::uint64_t stride(int k) const { return stride_[k]; }
  std::uint64_t index(const int* x) const;
  void coords(std::uint64_t idx, int* x) const;
  std::vector<int> coords(std::uint64_t idx) const;
  std::uint64_t neighbour(std::uint64_t idx, int k, int sign) const;

private:
  int N_, d_;
  std::uint64_t sites_;
  std::array<std::uint64_t, kMaxDim> stride_{};
};

/// Simple random walk on the torus from a uniform start. Each step moves one
/// coordinate by +-1 with probability 1/(2d).
class TorusWalker {
public:
  explicit TorusWalker(const TorusConfig& cfg);
  const Torus& torus() const { return torus_; }
  std::uint64_t time() const { return time_; }
  std::uint64_t site() const { return site_; }
  const int* x() const { return x_.data(); }
  void step() {
    std::uint32_t r = rng_.below(static_cast<std::uint32_t>(2 * d_));
    int k = static_cast<int>(r >> 1);
    if (r & 1u) {
      if (++x_[k] == N_) {
        x_[k] = 0;
        site_ -= static_cast<std::uint64_t>(N_ - 1) * torus_.stride(k);
      } else {
        site_ += torus_.stride(k);
      }
    } else {
      if (x_[k]-- == 0) {
        x_[k] = N_ - 1;
        site_ += static_cast<std::uint64_t>(N_ - 1) * torus_.stride(k);
      } else {
        site_ -= torus_.stride(k);
      }
    }
    ++time_;
  }

private:
  Torus torus_;
  int N_, d_;
  Philox rng_;
  std::array<int, kMaxDim> x_{};
  std::uint64_t site_ = 0;
  std::uint64_t time_ = 0;
};

struct LocalTimeField {
  TorusConfig config;
  std::uint64_t steps = 0;
  std::vector<std::uint32_t> counts;
  bool saturated = false;
  std::uint64_t total() const;
};

struct AlphaField {
  TorusConfig config;
  std::uint64_t horizon = 0;
  double g0 = 0;
  std::vector<std::uint64_t> firstHit;
  std::uint64_t markTime = kNever; // walker position recorded at this time, if reached
  std::uint64_t markSite = kNever;
  // H_x / (g0 N^d log N^d), +inf when unhit within the horizon
  double alpha(std::uint64_t x) const;
  std::uint64_t coverTime() const; // kNever if some site is unhit
};

struct WalkResult {
  LocalTimeField local;
  AlphaField alpha;
};

/// Runs horizonSteps steps, recording visit counts and first hitting times in one pass.
WalkResult runWalk(const TorusConfig& cfg, std::uint64_t horizonSteps, bool recordCounts = true);

/// Cover time C_N; throws past the safety horizon 100 g(0) N^d log N^d.
std::uint64_t coverTime(const TorusConfig& cfg);

/// u_F(alpha) = alpha g(0) log|F|
double uScale(double alpha, double cardF, double g0);
/// floor(u N^d)
std::uint64_t lateThreshold(double u, std::uint64_t sites);

struct LateSet {
  double alpha = 0;
  double u = 0;
  std::uint64_t threshold = 0;
  std::vector<std::uint64_t> members; // sorted site indices
};

/// Late points among F (all sites when F is empty): H_x > floor(u N^d) with u = uScale(alpha, |F|).
LateSet lateSet(const AlphaField& field, double alpha, const std::vector<std::uint64_t>& F = {});

/// Late set at a single level without storing hit times (one bit per site).
LateSet lateSetDirect(const TorusConfig& cfg, double alpha, double g0);
/// Nested late sets at several levels from one walk (levels in any order).
std::vector<LateSet> lateSetsDirect(const TorusConfig& cfg, const std::vector<double>& alphas, double g0);

/// First hitting times of every site, run until cover; the walker position at markTime is kept.
AlphaField runUntilCover(const TorusConfig& cfg, std::uint64_t markTime = kNever);

} // namespace lp
