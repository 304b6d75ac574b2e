#include "latepoints/lattice.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace lp {

FiniteSet::FiniteSet(int dim, std::vector<Point> pts) : d(dim), points(std::move(pts)) {
  if (d < 1) throw std::invalid_argument("FiniteSet: dimension must be positive");
  for (const auto& p : points)
    if (static_cast<int>(p.size()) != d) throw std::invalid_argument("FiniteSet: dimension mismatch");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
}

bool FiniteSet::contains(const Point& p) const { return std::binary_search(points.begin(), points.end(), p); }

FiniteSet FiniteSet::translated(const Point& v) const {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(add(p, v));
  return FiniteSet(d, std::move(out));
}

FiniteSet FiniteSet::unite(const FiniteSet& other) const {
  auto pts = points;
  pts.insert(pts.end(), other.points.begin(), other.points.end());
  return FiniteSet(d, std::move(pts));
}

std::string FiniteSet::str() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) os << ',';
    os << '(';
    for (int k = 0; k < d; ++k) os << (k ? "," : "") << points[i][k];
    os << ')';
  }
  os << '}';
  return os.str();
}

Point embed(const Point& p, int d) {
  if (static_cast<int>(p.size()) > d) throw std::invalid_argument("embed: point has more coordinates than target dimension");
  Point q(d, 0);
  std::copy(p.begin(), p.end(), q.begin());
  return q;
}

FiniteSet embed(const FiniteSet& K, int d) {
  std::vector<Point> pts;
  for (const auto& p : K.points) pts.push_back(embed(p, d));
  return FiniteSet(d, std::move(pts));
}

int supNorm(const Point& p) {
  int m = 0;
  for (int c : p) m = std::max(m, std::abs(c));
  return m;
}

int l1Norm(const Point& p) {
  int s = 0;
  for (int c : p) s += std::abs(c);
  return s;
}

Point sub(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
  return r;
}

Point add(const Point& a, const Point& b) {
  Point r(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
  return r;
}

int supDistance(const Point& a, const Point& b) { return supNorm(sub(a, b)); }

int supDistance(const FiniteSet& A, const FiniteSet& B) {
  int best = INT_MAX;
  for (const auto& a : A.points)
    for (const auto& b : B.points) best = std::min(best, supDistance(a, b));
  return best;
}

int l1Diameter(const FiniteSet& K) {
  int m = 0;
  for (const auto& a : K.points)
    for (const auto& b : K.points) m = std::max(m, l1Norm(sub(a, b)));
  return m;
}

int supDiameter(const FiniteSet& K) {
  int m = 0;
  for (const auto& a : K.points)
    for (const auto& b : K.points) m = std::max(m, supDistance(a, b));
  return m;
}

bool isConnected(const FiniteSet& K) {
  if (K.empty()) return true;
  std::vector<char> seen(K.size(), 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    auto i = q.front();
    q.pop();
    for (std::size_t j = 0; j < K.size(); ++j)
      if (!seen[j] && l1Norm(sub(K.points[i], K.points[j])) == 1) {
        seen[j] = 1;
        ++count;
        q.push(j);
      }
  }
  return count == K.size();
}

Box::Box(Point c, int r) : center(std::move(c)), side(r) {
  if (r < 1) throw std::invalid_argument("Box: side length must be at least 1");
}

bool Box::contains(const Point& p) const { return contains(p.data()); }

bool Box::contains(const int* p) const {
  for (int k = 0; k < dim(); ++k)
    if (p[k] < lo(k) || p[k] > hi(k)) return false;
  return true;
}

std::int64_t Box::volume() const {
  std::int64_t v = 1;
  for (int k = 0; k < dim(); ++k) v *= side;
  return v;
}

std::int64_t Box::index(const Point& p) const { return index(p.data()); }

std::int64_t Box::index(const int* p) const {
  std::int64_t i = 0;
  for (int k = 0; k < dim(); ++k) i = i * side + (p[k] - lo(k));
  return i;
}

Point Box::point(std::int64_t i) const {
  Point p(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    p[k] = static_cast<int>(i % side) + lo(k);
    i /= side;
  }
  return p;
}

std::vector<Point> Box::sites() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(volume()));
  for (std::int64_t i = 0; i < volume(); ++i) out.push_back(point(i));
  return out;
}

bool Box::onInnerBoundary(const int* p) const {
  if (!contains(p)) return false;
  for (int k = 0; k < dim(); ++k)
    if (p[k] == lo(k) || p[k] == hi(k)) return true;
  return false;
}

bool Box::onOuterBoundary(const int* p) const {
  int outside = 0;
  for (int k = 0; k < dim(); ++k) {
    if (p[k] == lo(k) - 1 || p[k] == hi(k) + 1)
      ++outside;
    else if (p[k] < lo(k) - 1 || p[k] > hi(k) + 1)
      return false;
  }
  return outside == 1;
}

std::vector<Point> Box::innerBoundary() const {
  std::vector<Point> out;
  for (std::int64_t i = 0; i < volume(); ++i) {
    auto p = point(i);
    if (onInnerBoundary(p.data())) out.push_back(p);
  }
  return out;
}

std::vector<Point> Box::outerBoundary() const {
  Box big(center, side + 2);
  std::vector<Point> out;
  for (std::int64_t i = 0; i < big.volume(); ++i) {
    auto p = big.point(i);
    if (onOuterBoundary(p.data())) out.push_back(p);
  }
  return out;
}

FiniteSet Box::asSet() const { return FiniteSet(dim(), sites()); }

std::vector<Point> neighbours(const Point& p) {
  std::vector<Point> out;
  for (std::size_t k = 0; k < p.size(); ++k)
    for (int s : {-1, 1}) {
      auto q = p;
      q[k] += s;
      out.push_back(q);
    }
  return out;
}

} // namespace lp
