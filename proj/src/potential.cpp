#include "latepoints/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace lp {

using Ext = boost::multiprecision::cpp_bin_float_50;

void GreenParams::validate() const {
  if (hNum <= 0 || hDen <= 0) throw std::invalid_argument("GreenParams: h must be positive");
  if (M < 1) throw std::invalid_argument("GreenParams: M must be at least 1");
  if (!(T > 0) || T > J) throw std::invalid_argument("GreenParams: need 0 < T <= J");
  if (Jtilde < 1) throw std::invalid_argument("GreenParams: Jtilde must be at least 1");
  if (maxOrder < 0) throw std::invalid_argument("GreenParams: maxOrder must be non-negative");
  if (maxOrder > kMaxGreenOrder)
    throw std::invalid_argument("GreenParams: maxOrder above 54 is outside the validated range of the scheme");
  if (M * h() < 45.0) throw std::invalid_argument("GreenParams: need M*h >= 45");
}

GreenParams GreenParams::refined() const {
  GreenParams r = *this;
  r.hDen = 2 * hDen;
  r.M = 2 * M;
  r.T = 2 * T;
  r.J = std::max(2 * J, static_cast<int>(std::ceil(r.T)));
  r.Jtilde = 2 * Jtilde;
  return r;
}

namespace {

template <class Real>
Real logFactorial(int k) {
  using std::log;
  Real s = 0;
  for (int i = 2; i <= k; ++i) s += log(Real(i));
  return s;
}

} // namespace

template <class Real>
Real besselSeriesT(const Real& t, int k, int J) {
  using std::exp;
  using std::log;
  if (k < 0) throw std::invalid_argument("besselSeriesT: k must be non-negative");
  if (t < 0) throw std::invalid_argument("besselSeriesT: t must be non-negative");
  if (t > Real(J)) throw std::invalid_argument("besselSeriesT: t exceeds J");
  if (t == 0) return k == 0 ? Real(1) : Real(0);
  Real term = exp(-t + Real(k) * log(t / 2) - logFactorial<Real>(k));
  Real sum = term;
  Real q = t * t / 4;
  for (int j = 1; j <= J; ++j) {
    term *= q / (Real(j) * Real(j + k));
    sum += term;
  }
  return sum;
}

template <class Real>
Real besselAsymptoticA(const Real& t, int k, int Jtilde) {
  using std::sqrt;
  if (!(t > 0)) throw std::invalid_argument("besselAsymptoticA: t must be positive");
  Real term = 1;
  Real sum = 1;
  Real k4 = Real(4) * k * k;
  for (int j = 1; j <= Jtilde; ++j) {
    Real odd = Real(2 * j - 1);
    term *= (odd * odd - k4) / (Real(8) * j * t);
    sum += term;
  }
  return sum / sqrt(2 * boost::math::constants::pi<Real>() * t);
}

double hankelCoefficient(int k, int j) {
  double c = 1;
  for (int i = 1; i <= j; ++i) c *= (4.0 * k * k - (2.0 * i - 1) * (2.0 * i - 1)) / (4.0 * i);
  return c;
}

template <class Real>
GreenQuadrature<Real>::GreenQuadrature(int d, const GreenParams& params) : d_(d), p_(params) {
  using std::exp;
  using std::pow;
  if (d < 3) throw std::invalid_argument("Green's function requires d >= 3");
  p_.validate();
  const Real h = Real(p_.hNum) / Real(p_.hDen);
  const Real T = Real(p_.T);
  const int nodes = 2 * p_.M + 1;
  weight_.resize(nodes);
  bess_.assign(p_.maxOrder + 1, std::vector<Real>(nodes));
  for (int i = 0; i < nodes; ++i) {
    int m = i - p_.M;
    Real t = exp(h * m);
    weight_[i] = Real(d) * h * t;
    for (int k = 0; k <= p_.maxOrder; ++k)
      bess_[k][i] = (t <= T) ? besselSeriesT<Real>(t, k, p_.J) : besselAsymptoticA<Real>(t, k, p_.Jtilde);
  }
  const Real a = Real(d) / 2 - 1;
  const Real twoPi = 2 * boost::math::constants::pi<Real>();
  tail_ = Real(d) / pow(twoPi, Real(d) / 2) * h * exp(-Real(p_.M + 1) * a * h) / (1 - exp(-a * h));
}

template <class Real>
Real GreenQuadrature<Real>::value(const std::vector<int>& absCoords) const {
  if (static_cast<int>(absCoords.size()) != d_) throw std::invalid_argument("GreenQuadrature: dimension mismatch");
  for (int c : absCoords)
    if (c < 0 || c > p_.maxOrder) throw std::out_of_range("GreenQuadrature: coordinate exceeds maxOrder");
  Real s = 0;
  for (std::size_t i = 0; i < weight_.size(); ++i) {
    Real prod = weight_[i];
    for (int c : absCoords) prod *= bess_[c][i];
    s += prod;
  }
  return s + tail_;
}

template double besselSeriesT<double>(const double&, int, int);
template double besselAsymptoticA<double>(const double&, int, int);
template Ext besselSeriesT<Ext>(const Ext&, int, int);
template Ext besselAsymptoticA<Ext>(const Ext&, int, int);
template class GreenQuadrature<double>;
template class GreenQuadrature<Ext>;

std::vector<int> greenKey(const Point& x) {
  std::vector<int> k(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) k[i] = std::abs(x[i]);
  std::sort(k.begin(), k.end(), std::greater<>());
  return k;
}

std::string keyString(const std::vector<int>& key) {
  std::string s;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) s += ':';
    s += std::to_string(key[i]);
  }
  return s;
}

namespace {

GreenParams paramsFor(const Point& x, GreenParams p) {
  if (supNorm(x) > p.maxOrder)
    throw std::out_of_range("greenValue: |x_k| exceeds maxOrder");
  return p;
}

} // namespace

GreenValue greenValue(const Point& x, const GreenParams& params) {
  auto p = paramsFor(x, params);
  GreenQuadrature<double> q(static_cast<int>(x.size()), p);
  GreenQuadrature<double> qr(static_cast<int>(x.size()), p.refined());
  auto key = greenKey(x);
  double v = q.value(key);
  double vr = qr.value(key);
  return {v, 4 * std::abs(v - vr)};
}

GreenValueExt greenValueExtended(const Point& x, const GreenParams& params) {
  auto p = paramsFor(x, params);
  GreenQuadrature<Ext> q(static_cast<int>(x.size()), p);
  GreenQuadrature<Ext> qr(static_cast<int>(x.size()), p.refined());
  auto key = greenKey(x);
  Ext v = q.value(key);
  Ext vr = qr.value(key);
  GreenValueExt out;
  out.value = v.str(40, std::ios_base::fixed);
  out.err = static_cast<double>(4 * abs(v - vr));
  out.valueDouble = static_cast<double>(v);
  return out;
}

double greenAtOrigin(int d) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it != cache.end()) return it->second;
  GreenQuadrature<double> q(d, GreenParams{});
  double v = q.value(std::vector<int>(d, 0));
  cache[d] = v;
  return v;
}

double greenLeadingConstant(int d) {
  const double pi = boost::math::constants::pi<double>();
  return 0.5 * d * std::tgamma(0.5 * d - 1) * std::pow(pi, -0.5 * d);
}

double greenAsymptotic(const double* x, int d) {
  double r2 = 0, r4 = 0;
  for (int k = 0; k < d; ++k) {
    r2 += x[k] * x[k];
    r4 += x[k] * x[k] * x[k] * x[k];
  }
  if (r2 == 0) throw std::invalid_argument("greenAsymptotic: undefined at the origin");
  double r = std::sqrt(r2);
  double lead = greenLeadingConstant(d) * std::pow(r, 2.0 - d);
  if (d != 3) return lead;
  const double pi = boost::math::constants::pi<double>();
  return lead + 3.0 / (16.0 * pi * r * r2) * (5.0 * r4 / (r2 * r2) - 3.0);
}

double greenAsymptotic(const Point& x) {
  std::vector<double> xd(x.begin(), x.end());
  return greenAsymptotic(xd.data(), static_cast<int>(x.size()));
}

GreenTable GreenTable::build(int d, int radius, const GreenParams& params) {
  if (d < 3) throw std::invalid_argument("GreenTable: d must be at least 3");
  if (radius < 0) throw std::invalid_argument("GreenTable: negative radius");
  GreenParams p = params;
  if (radius > p.maxOrder) {
    if (radius > kMaxGreenOrder) throw std::invalid_argument("GreenTable: radius above 54 is not supported");
    p.maxOrder = radius;
  }
  GreenQuadrature<double> q(d, p);
  GreenQuadrature<double> qr(d, p.refined());
  GreenTable t;
  t.d_ = d;
  t.radius_ = radius;
  t.params_ = p;
  std::vector<int> key(d, 0);
  // enumerate non-increasing sequences radius >= a_1 >= ... >= a_d >= 0
  std::function<void(int, int)> rec = [&](int pos, int bound) {
    if (pos == d) {
      double v = q.value(key);
      double vr = qr.value(key);
      t.values_[key] = {v, 4 * std::abs(v - vr)};
      return;
    }
    for (int a = 0; a <= bound; ++a) {
      key[pos] = a;
      rec(pos + 1, a);
    }
  };
  rec(0, radius);

  for (const auto& [k, gv] : t.values_)
    if (!(gv.value > 0)) throw std::runtime_error("GreenTable: non-positive value at " + keyString(k));
  for (int n = 0; n <= radius; ++n) {
    double atN = t.supAtL1(n);
    double beyond = -1;
    double errMax = 0;
    for (const auto& [k, gv] : t.values_) {
      int l1 = 0;
      for (int c : k) l1 += c;
      if (l1 > n) beyond = std::max(beyond, gv.value);
      errMax = std::max(errMax, gv.err);
    }
    if (beyond >= 0 && !(beyond + errMax < atN))
      throw std::runtime_error("GreenTable: monotonicity in |x|_1 violated at n=" + std::to_string(n));
  }
  return t;
}

bool GreenTable::covers(const Point& x) const {
  return static_cast<int>(x.size()) == d_ && supNorm(x) <= radius_;
}

const GreenValue& GreenTable::at(const Point& x) const {
  if (!covers(x)) throw std::out_of_range("GreenTable: point outside table");
  auto it = values_.find(greenKey(x));
  if (it == values_.end()) throw std::out_of_range("GreenTable: missing key");
  return it->second;
}

double GreenTable::g0() const { return at(Point(d_, 0)).value; }

double GreenTable::maxErr() const {
  double e = 0;
  for (const auto& kv : values_) e = std::max(e, kv.second.err);
  return e;
}

double GreenTable::supAtL1(int n) const {
  double best = -1;
  for (const auto& [k, gv] : values_) {
    int l1 = 0;
    for (int c : k) l1 += c;
    if (l1 == n) best = std::max(best, gv.value);
  }
  return best;
}

std::string GreenTable::toCsv() const {
  std::ostringstream os;
  os << "d,key,value,err\n";
  os << std::setprecision(17);
  for (const auto& [k, gv] : values_) os << d_ << ',' << keyString(k) << ',' << gv.value << ',' << gv.err << '\n';
  return os.str();
}

GreenTable GreenTable::fromCsv(const std::string& text, const GreenParams& params) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("d,key,value,err", 0) != 0)
    throw std::runtime_error("GreenTable::fromCsv: bad header");
  GreenTable t;
  t.params_ = params;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string dStr, keyStr, vStr, eStr;
    std::getline(ls, dStr, ',');
    std::getline(ls, keyStr, ',');
    std::getline(ls, vStr, ',');
    std::getline(ls, eStr, ',');
    int d = std::stoi(dStr);
    if (t.d_ == 0) t.d_ = d;
    if (d != t.d_) throw std::runtime_error("GreenTable::fromCsv: mixed dimensions");
    std::vector<int> key;
    std::istringstream ks(keyStr);
    std::string part;
    while (std::getline(ks, part, ':')) key.push_back(std::stoi(part));
    if (static_cast<int>(key.size()) != d) throw std::runtime_error("GreenTable::fromCsv: key length mismatch");
    std::sort(key.begin(), key.end(), std::greater<>());
    t.radius_ = std::max(t.radius_, key[0]);
    t.values_[key] = {std::stod(vStr), std::stod(eStr)};
  }
  // a table is only complete if every key up to the radius is present
  std::size_t expected = 1;
  for (int i = 1; i <= t.d_; ++i) expected = expected * (t.radius_ + i) / i;
  if (t.values_.size() != expected) throw std::runtime_error("GreenTable::fromCsv: incomplete table");
  return t;
}

CapacityResult capacity(const FiniteSet& K, const GreenTable& table) {
  if (K.empty()) throw std::invalid_argument("capacity: empty set");
  if (K.d != table.dim()) throw std::invalid_argument("capacity: dimension mismatch");
  const int n = static_cast<int>(K.size());
  Eigen::MatrixXd G(n, n);
  double entryErr = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& gv = table.at(sub(K.points[i], K.points[j]));
      G(i, j) = gv.value;
      entryErr = std::max(entryErr, gv.err);
    }
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd e;
  CapacityResult r;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() == Eigen::Success) {
    e = llt.solve(ones);
    r.solver = "cholesky";
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible()) throw std::runtime_error("capacity: singular Green matrix, table is inconsistent");
    e = lu.solve(ones);
    r.solver = "lu";
  }
  if (!e.allFinite()) throw std::runtime_error("capacity: non-finite solution");
  r.set = K;
  r.residual = (G * e - ones).lpNorm<Eigen::Infinity>();
  r.equilibrium.assign(e.data(), e.data() + n);
  r.cap = e.sum();
  double l1 = e.lpNorm<1>();
  r.errEstimate = l1 * l1 * entryErr + l1 * r.residual;
  double g0 = table.g0();
  r.alphaStar = 1.0 / (g0 * r.cap);
  r.admissible = r.cap <= 2.0 / g0;
  return r;
}

double alphaStarNeighbors(const GreenTable& table) { return 1.0 - 1.0 / (2.0 * table.g0()); }

double subadditivityDefect(const FiniteSet& K, const FiniteSet& Kp, const GreenTable& table) {
  for (const auto& p : K.points)
    if (Kp.contains(p)) throw std::invalid_argument("subadditivityDefect: sets must be disjoint");
  return capacity(K, table).cap + capacity(Kp, table).cap - capacity(K.unite(Kp), table).cap;
}

CapacityResult relativeCapacity(const FiniteSet& K, const Box& U, double tol) {
  const int d = U.dim();
  if (K.d != d) throw std::invalid_argument("relativeCapacity: dimension mismatch");
  for (const auto& p : K.points)
    if (!U.contains(p)) throw std::invalid_argument("relativeCapacity: K must lie inside U");
  const std::int64_t vol = U.volume();
  std::vector<std::int64_t> unk(static_cast<std::size_t>(vol), -1);
  std::vector<char> inK(static_cast<std::size_t>(vol), 0);
  for (const auto& p : K.points) inK[U.index(p)] = 1;
  std::int64_t n = 0;
  for (std::int64_t i = 0; i < vol; ++i)
    if (!inK[i]) unk[i] = n++;

  const double w = 1.0 / (2.0 * d);
  Eigen::VectorXd hvals;
  if (n > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (std::int64_t i = 0; i < vol; ++i) {
      if (unk[i] < 0) continue;
      trip.emplace_back(unk[i], unk[i], 1.0);
      auto p = U.point(i);
      for (const auto& q : neighbours(p)) {
        if (!U.contains(q)) {
          b[unk[i]] += w;
          continue;
        }
        auto j = U.index(q);
        if (unk[j] >= 0) trip.emplace_back(unk[i], unk[j], -w);
      }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(std::max<std::int64_t>(1000, 20 * n));
    cg.compute(A);
    hvals = cg.solve(b);
    if (cg.info() != Eigen::Success || !(cg.error() <= tol)) {
      std::ostringstream os;
      os << "relativeCapacity: conjugate gradients did not converge, relative residual " << cg.error() << " after "
         << cg.iterations() << " iterations";
      throw std::runtime_error(os.str());
    }
  }
  CapacityResult r;
  r.set = K;
  r.solver = "cg";
  for (const auto& p : K.points) {
    double s = 0;
    for (const auto& q : neighbours(p)) {
      if (!U.contains(q))
        s += 1.0;
      else if (unk[U.index(q)] >= 0)
        s += hvals[unk[U.index(q)]];
    }
    r.equilibrium.push_back(w * s);
  }
  for (double e : r.equilibrium) r.cap += e;
  r.errEstimate = tol * r.cap;
  double g0 = greenAtOrigin(d);
  r.alphaStar = 1.0 / (g0 * r.cap);
  r.admissible = r.cap <= 2.0 / g0;
  return r;
}

FiniteSet shapeK1(int d) { return embed(FiniteSet(2, {{0, 0}, {0, 1}, {0, 2}}), d); }
FiniteSet shapeK2(int d) { return embed(FiniteSet(2, {{0, 0}, {0, 1}, {1, 0}}), d); }

std::vector<FiniteSet> shapesA(int d) {
  if (d < 3) throw std::invalid_argument("shapesA: d must be at least 3");
  std::vector<FiniteSet> A = {
      FiniteSet(3, {{0, 0, 0}, {0, 2, 0}, {0, 1, 1}}),
      FiniteSet(3, {{0, 0, 0}, {0, 2, 0}, {0, 3, 0}}),
      FiniteSet(3, {{0, 0, 0}, {1, 1, 0}, {0, 3, 0}}),
      FiniteSet(3, {{0, 0, 0}, {0, 2, 0}, {1, 2, 0}}),
      FiniteSet(3, {{0, 0, 0}, {1, 1, 0}, {1, 2, 0}}),
      FiniteSet(3, {{0, 0, 0}, {0, 2, 0}, {1, 1, 1}}),
      FiniteSet(3, {{0, 0, 0}, {1, 1, 0}, {1, 1, 1}}),
      FiniteSet(3, {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}}),
  };
  for (auto& s : A) s = embed(s, d);
  return A;
}

namespace {

Comparison compare(const std::string& name, const FiniteSet& K, const GreenTable& t, double threshold) {
  auto c = capacity(K, t);
  Comparison out;
  out.name = name;
  out.set = K;
  out.cap = c.cap;
  out.err = c.errEstimate;
  out.threshold = threshold;
  out.margin = threshold - c.cap;
  out.admissible = out.margin >= 0;
  return out;
}

} // namespace

Classification classifyAdmissible(int d, const GreenParams& params) {
  if (d < 3) throw std::invalid_argument("classifyAdmissible: d must be at least 3");
  if (d >= 5) {
    Classification base = classifyAdmissible(4, params);
    base.notes.push_back("d=" + std::to_string(d) +
                         ": g(0)cap(K) is non-decreasing in the dimension, so every set with at least three points "
                         "stays inadmissible; verdict inherited from d=4");
    base.d = d;
    return base;
  }
  const int radius = d == 3 ? 3 : 2;
  GreenTable t = GreenTable::build(d, radius, params);
  Classification c;
  c.d = d;
  c.g0 = t.g0();
  c.threshold = 2.0 / c.g0;
  double thrErr = 2.0 / (c.g0 * c.g0) * t.at(Point(d, 0)).err;

  for (const auto& [k, gv] : t.values())
    if (!(gv.value > 0)) throw std::runtime_error("classifyAdmissible: non-positive Green value");
  c.notes.push_back("pairs: cap({x,y}) = 2/(g(0)+g(x-y)) < 2/g(0) because g > 0, so every set with at most two "
                    "points is admissible");

  c.comparisons.push_back(compare("K1", shapeK1(d), t, c.threshold));
  c.comparisons.push_back(compare("K2", shapeK2(d), t, c.threshold));
  if (d == 3) {
    auto A = shapesA(d);
    for (std::size_t i = 0; i < A.size(); ++i)
      c.comparisons.push_back(compare("A" + std::to_string(i + 1), A[i], t, c.threshold));
  }
  for (const auto& cmp : c.comparisons)
    if (std::abs(cmp.margin) < 10.0 * (cmp.err + thrErr)) {
      c.refused = true;
      c.notes.push_back("margin of " + cmp.name + " is below ten times its error estimate");
    }

  const bool k1 = c.comparisons[0].admissible, k2 = c.comparisons[1].admissible;
  if (d == 3) {
    bool anyA = false;
    for (std::size_t i = 2; i < c.comparisons.size(); ++i) anyA = anyA || c.comparisons[i].admissible;
    c.connectedTriplesAdmissible = k1 && k2;
    c.otherTriplesAdmissible = anyA;
    if (!anyA && k1 && k2)
      c.verdict = "admissible = {|K| <= 2} U {connected triples}";
    else {
      c.verdict = "undetermined: comparisons do not match a closed classification";
      c.refused = true;
    }
    c.notes.push_back("every set with |K| >= 3 not isomorphic to K1 or K2 has capacity at least min cap(A_i)");
  } else {
    c.connectedTriplesAdmissible = k1 || k2;
    c.otherTriplesAdmissible = false;
    if (!k1 && !k2)
      c.verdict = "admissible = {|K| <= 2}";
    else {
      c.verdict = "undetermined: a connected triple is admissible in d=4";
      c.refused = true;
    }
    c.notes.push_back("every set with |K| >= 3 has capacity at least min(cap(K1), cap(K2))");
  }
  if (c.refused && c.verdict.rfind("undetermined", 0) != 0) c.verdict = "refused: " + c.verdict;
  return c;
}

} // namespace lp
