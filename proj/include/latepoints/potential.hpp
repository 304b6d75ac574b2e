#pragma once

#include <map>
#include <string>
#include <vector>

#include "latepoints/lattice.hpp"

namespace lp {

/// Discretisation parameters of the Green's function quadrature.
struct GreenParams {
  // step size h = hNum / hDen, kept rational so extended precision sees the exact value
  long hNum = 76;
  long hDen = 630;
  int M = 630;
  double T = 80.0;
  int J = 139;
  int Jtilde = 30;
  int maxOrder = 3;

  double h() const { return static_cast<double>(hNum) / static_cast<double>(hDen); }
  void validate() const;
  // (h/2, 2M, 2T) with J and Jtilde doubled
  GreenParams refined() const;
};

inline constexpr int kMaxGreenOrder = 54;

// e^{-t} (t/2)^k sum_{j<=J} (t^2/4)^j / (j! (j+k)!)
template <class Real>
Real besselSeriesT(const Real& t, int k, int J);

// (2 pi t)^{-1/2} sum_{j<=Jtilde} (-1)^j (k,j) / (2t)^j
template <class Real>
Real besselAsymptoticA(const Real& t, int k, int Jtilde);

// (k,j) = prod_{i=1..j} (4k^2 - (2i-1)^2) / (4^j j!)
double hankelCoefficient(int k, int j);

struct GreenValue {
  double value = 0;
  double err = 0;
};

/// Precomputed quadrature: per node and per coordinate magnitude k the
/// approximant of e^{-t} I_k(t), so each point costs d products per node.
template <class Real>
class GreenQuadrature {
public:
  GreenQuadrature(int d, const GreenParams& params);
  // x holds |x_k|, any order
  Real value(const std::vector<int>& absCoords) const;
  Real tail() const { return tail_; }
  int dim() const { return d_; }

private:
  int d_;
  GreenParams p_;
  std::vector<Real> weight_;            // d h e^{hm}
  std::vector<std::vector<Real>> bess_; // [k][m]
  Real tail_;
};

/// g(x) and its refinement error estimate in double precision.
GreenValue greenValue(const Point& x, const GreenParams& params = {});
/// Same quadrature in 50-digit binary floating point; value as a decimal string.
struct GreenValueExt {
  std::string value;
  double err = 0;
  double valueDouble = 0;
};
GreenValueExt greenValueExtended(const Point& x, const GreenParams& params = {});

/// g(0) at the default parameters, computed once per dimension.
double greenAtOrigin(int d);

/// Leading-order behaviour of g at large |x|; in d=3 the next correction is included.
double greenAsymptotic(const Point& x);
double greenAsymptotic(const double* x, int d);
// a_d with g(x) ~ a_d |x|^{2-d}
double greenLeadingConstant(int d);

/// Sorted absolute coordinates, the symmetry-class key of g.
std::vector<int> greenKey(const Point& x);
std::string keyString(const std::vector<int>& key);

class GreenTable {
public:
  GreenTable() = default;
  static GreenTable build(int d, int radius, const GreenParams& params = {});

  int dim() const { return d_; }
  int radius() const { return radius_; }
  const GreenParams& params() const { return params_; }
  const std::map<std::vector<int>, GreenValue>& values() const { return values_; }

  bool covers(const Point& x) const;
  // throws when x is not covered
  const GreenValue& at(const Point& x) const;
  double g(const Point& x) const { return at(x).value; }
  double g0() const;
  double maxErr() const;

  // largest g over |x|_1 == n inside the table
  double supAtL1(int n) const;

  std::string toCsv() const;
  static GreenTable fromCsv(const std::string& text, const GreenParams& params = {});

private:
  int d_ = 0;
  int radius_ = 0;
  GreenParams params_;
  std::map<std::vector<int>, GreenValue> values_;
};

struct CapacityResult {
  FiniteSet set;
  double cap = 0;
  std::vector<double> equilibrium;
  double alphaStar = 0;
  double errEstimate = 0;
  double residual = 0;
  bool admissible = false;
  std::string solver;
};

CapacityResult capacity(const FiniteSet& K, const GreenTable& table);
double alphaStarNeighbors(const GreenTable& table);
double subadditivityDefect(const FiniteSet& K, const FiniteSet& Kp, const GreenTable& table);

/// Capacity relative to a box U: Dirichlet problem solved by conjugate gradients.
CapacityResult relativeCapacity(const FiniteSet& K, const Box& U, double tol = 1e-12);

struct Comparison {
  std::string name;
  FiniteSet set;
  double cap = 0;
  double err = 0;
  double threshold = 0;
  double margin = 0; // threshold - cap, positive means admissible
  bool admissible = false;
};

struct Classification {
  int d = 0;
  double g0 = 0;
  double threshold = 0; // 2/g(0)
  std::vector<Comparison> comparisons;
  bool connectedTriplesAdmissible = false;
  bool otherTriplesAdmissible = false;
  bool refused = false;
  std::string verdict;
  std::vector<std::string> notes;
};

/// Admissibility verdict computed from capacities of K1, K2 and A1..A8.
Classification classifyAdmissible(int d, const GreenParams& params = {});

// reference shapes
FiniteSet shapeK1(int d);
FiniteSet shapeK2(int d);
std::vector<FiniteSet> shapesA(int d);

} // namespace lp
