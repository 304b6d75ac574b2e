#include "latepoints/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace lp {

namespace {
std::string pointStr(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p[i]);
  }
  return s;
}

std::string timeStr(std::uint64_t t) { return t == kNever ? "inf" : std::to_string(t); }
} // namespace

std::size_t ExcursionSchedule::returnsBefore(std::uint64_t t) const {
  return static_cast<std::size_t>(std::lower_bound(R.begin(), R.end(), t) - R.begin());
}

void ExcursionSchedule::writeCsv(std::ostream& os) const {
  os << "k,R_k,D_k,H_k,entry,exit\n";
  for (std::size_t k = 0; k < R.size(); ++k)
    os << k + 1 << ',' << R[k] << ',' << timeStr(D[k]) << ',' << timeStr(H[k]) << ',' << pointStr(entry[k]) << ','
       << pointStr(exit[k]) << '\n';
}

std::string ExcursionSchedule::validate(const Box& B1, const Box& B2, const Box& B3) const {
  std::ostringstream err;
  std::uint64_t prevD = D0;
  for (std::size_t k = 0; k < R.size(); ++k) {
    if (R[k] < prevD) err << "R_" << k + 1 << " < D_" << k << "; ";
    if (D[k] != kNever && D[k] < R[k]) err << "D_" << k + 1 << " < R_" << k + 1 << "; ";
    if (!B2.onInnerBoundary(entry[k].data())) err << "entry " << k + 1 << " off the inner boundary of B2; ";
    if (D[k] != kNever && !B3.onOuterBoundary(exit[k].data())) err << "exit " << k + 1 << " off the exterior boundary of B3; ";
    if (H[k] != kNever && (H[k] < R[k] || (D[k] != kNever && H[k] > D[k]))) err << "H_" << k + 1 << " outside [R, D]; ";
    if (rangesStored && D[k] != kNever && ranges[k].empty() != (H[k] == kNever))
      err << "Z_" << k + 1 << " cemetery mismatch; ";
    if (rangesStored && k < ranges.size() && !ranges[k].empty()) {
      bool hitsB1 = false;
      for (const auto& p : ranges[k]) {
        if (!B3.contains(p)) err << "Z_" << k + 1 << " leaves B3; ";
        hitsB1 = hitsB1 || B1.onInnerBoundary(p.data());
      }
      if (!hitsB1) err << "Z_" << k + 1 << " misses the boundary of B1; ";
    }
    prevD = D[k];
  }
  return err.str();
}

void checkNesting(const Box& B1, const Box& B2, const Box& B3) {
  if (B1.center != B2.center || B2.center != B3.center) throw std::invalid_argument("excursions: boxes must be concentric");
  if (!(B1.side <= B2.side && B2.side < B3.side)) throw std::invalid_argument("excursions: need B1 <= B2 < B3");
}

ExcursionTracker::ExcursionTracker(Box B1, Box B2, Box B3, bool storeRanges)
    : b1_(std::move(B1)), b2_(std::move(B2)), b3_(std::move(B3)), store_(storeRanges) {
  checkNesting(b1_, b2_, b3_);
  s_.rangesStored = storeRanges;
}

void ExcursionTracker::feed(std::uint64_t t, const int* x) {
  const int d = b3_.dim();
  switch (phase_) {
  case Phase::SeekD0:
    if (b3_.onOuterBoundary(x)) {
      s_.D0 = t;
      phase_ = Phase::SeekReturn;
    }
    return;
  case Phase::SeekReturn:
    if (!b2_.onInnerBoundary(x)) return;
    s_.R.push_back(t);
    s_.D.push_back(kNever);
    s_.H.push_back(kNever);
    s_.entry.emplace_back(x, x + d);
    s_.exit.emplace_back();
    if (store_) s_.ranges.emplace_back();
    buffer_.clear();
    lastB2_ = 0;
    phase_ = Phase::InExcursion;
    [[fallthrough]];
  case Phase::InExcursion:
    if (b3_.onOuterBoundary(x)) {
      s_.D.back() = t;
      s_.exit.back().assign(x, x + d);
      if (store_ && s_.H.back() != kNever) {
        buffer_.resize(lastB2_);
        std::sort(buffer_.begin(), buffer_.end());
        buffer_.erase(std::unique(buffer_.begin(), buffer_.end()), buffer_.end());
        s_.ranges.back() = std::move(buffer_);
      }
      buffer_.clear();
      phase_ = Phase::SeekReturn;
      return;
    }
    if (s_.H.back() == kNever && b1_.onInnerBoundary(x)) s_.H.back() = t;
    if (store_ && s_.H.back() != kNever) {
      buffer_.emplace_back(x, x + d);
      if (b2_.contains(x)) lastB2_ = buffer_.size();
    }
    return;
  }
}

ExcursionSchedule excursionDecompose(const std::vector<Point>& trace, const Box& B1, const Box& B2, const Box& B3,
                                     bool storeRanges) {
  ExcursionTracker tr(B1, B2, B3, storeRanges);
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (static_cast<int>(trace[t].size()) != B3.dim()) throw std::invalid_argument("excursionDecompose: dimension mismatch");
    tr.feed(t, trace[t].data());
  }
  return tr.take();
}

void liftToBox(const int* torusX, const Box& B4, int N, int d, int* out) {
  for (int k = 0; k < d; ++k) {
    int lo = B4.lo(k);
    int r = (torusX[k] - lo) % N;
    if (r < 0) r += N;
    out[k] = lo + r;
  }
}

WalkExcursions walkExcursions(const TorusConfig& cfg, const Box& B1, const Box& B2, const Box& B3, std::uint64_t steps,
                              bool storeRanges) {
  checkNesting(B1, B2, B3);
  if (B3.dim() != cfg.d) throw std::invalid_argument("walkExcursions: dimension mismatch");
  if (B3.side + 2 > cfg.N) throw std::invalid_argument("walkExcursions: B3 and its exterior boundary must fit in the torus");
  Box B4(B3.center, cfg.N);
  TorusWalker w(cfg);
  ExcursionTracker tr(B1, B2, B3, storeRanges);
  auto inner = B2.innerBoundary();
  std::sort(inner.begin(), inner.end());
  WalkExcursions out;
  out.entryCounts.assign(inner.size(), 0);
  std::array<int, kMaxDim> y{};
  std::size_t seen = 0;
  for (;;) {
    liftToBox(w.x(), B4, cfg.N, cfg.d, y.data());
    tr.feed(w.time(), y.data());
    const auto& s = tr.schedule();
    if (s.R.size() > seen) {
      auto it = std::lower_bound(inner.begin(), inner.end(), s.entry.back());
      ++out.entryCounts[static_cast<std::size_t>(it - inner.begin())];
      seen = s.R.size();
    }
    if (w.time() >= steps) break;
    w.step();
  }
  out.steps = steps;
  out.schedule = tr.take();
  return out;
}

std::uint64_t countRW(const ExcursionSchedule& s, double u, std::uint64_t sites) {
  if (u <= 0) return 0;
  double limit = u * static_cast<double>(sites);
  auto cut = static_cast<std::uint64_t>(std::ceil(limit));
  return s.returnsBefore(cut);
}

RIExcursions riExcursions(const FiniteSet& source, const EquilibriumSampler& eq, const RIConfig& cfg, const Box& B1,
                          const Box& B2, const Box& B3) {
  checkNesting(B1, B2, B3);
  for (const auto& p : eq.points())
    if (B3.contains(p)) throw std::invalid_argument("riExcursions: trajectories must start outside B3");
  RIExcursions out;
  std::int64_t current = -1;
  std::uint64_t t = 0;
  std::unique_ptr<ExcursionTracker> tr;
  auto flush = [&] {
    if (!tr) return;
    auto n = tr->schedule().returns();
    out.perTraj.push_back(n);
    out.total += n;
    if (n == 0) ++out.neverEnteredB2;
  };
  auto sample = sampleRI(source, eq, cfg, [&](std::int64_t j, double, const int* x, bool) {
    if (j != current) {
      flush();
      tr = std::make_unique<ExcursionTracker>(B1, B2, B3, false);
      current = j;
      t = 0;
    }
    tr->feed(t++, x);
  });
  flush();
  out.trajectories = sample.trajCount;
  out.truncationBiasBound = sample.truncationBiasBound;
  return out;
}

ConcentrationReport concentrationReport(const std::vector<double>& samples, double reference, const std::vector<double>& epsGrid) {
  if (samples.empty()) throw std::invalid_argument("concentrationReport: no samples");
  ConcentrationReport r;
  r.reference = reference;
  r.samples = samples.size();
  double s = 0, s2 = 0;
  for (double x : samples) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(samples.size());
  r.mean = s / n;
  r.sd = samples.size() > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / n) / (n - 1))) : 0.0;
  for (double e : epsGrid) {
    std::size_t c = 0;
    for (double x : samples)
      if (e == 0 ? true : std::abs(x - reference) > e * reference) ++c;
    double p = static_cast<double>(c) / n;
    r.tail.push_back({e, p, std::sqrt(p * (1 - p) / n)});
  }
  return r;
}

} // namespace lp
