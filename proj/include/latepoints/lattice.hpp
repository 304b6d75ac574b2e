#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lp {

using Point = std::vector<int>;

/// Deduplicated, lexicographically sorted set of lattice points of common dimension.
struct FiniteSet {
  int d = 0;
  std::vector<Point> points;

  FiniteSet() = default;
  FiniteSet(int dim, std::vector<Point> pts);

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool contains(const Point& p) const;
  FiniteSet translated(const Point& v) const;
  FiniteSet unite(const FiniteSet& other) const;
  std::string str() const;
};

/// Pads a point with zeros up to dimension d.
Point embed(const Point& p, int d);
FiniteSet embed(const FiniteSet& K, int d);

int supNorm(const Point& p);
int l1Norm(const Point& p);
Point sub(const Point& a, const Point& b);
Point add(const Point& a, const Point& b);
int supDistance(const Point& a, const Point& b);
// smallest sup-distance between the two sets
int supDistance(const FiniteSet& A, const FiniteSet& B);
int l1Diameter(const FiniteSet& K);
int supDiameter(const FiniteSet& K);
// nearest-neighbour connectivity
bool isConnected(const FiniteSet& K);

/// Box Q(x,r) = x + [-floor((r-1)/2), ceil((r-1)/2)]^d of side length r.
struct Box {
  Point center;
  int side = 1;

  Box() = default;
  Box(Point c, int r);

  int dim() const { return static_cast<int>(center.size()); }
  int lo(int k) const { return center[k] - (side - 1) / 2; }
  int hi(int k) const { return center[k] + side / 2; }
  bool contains(const Point& p) const;
  bool contains(const int* p) const;
  std::int64_t volume() const;
  // row-major enumeration, first coordinate slowest
  std::int64_t index(const Point& p) const;
  std::int64_t index(const int* p) const;
  Point point(std::int64_t i) const;
  std::vector<Point> sites() const;
  // sites of the box with a neighbour outside it
  std::vector<Point> innerBoundary() const;
  // sites outside the box with a neighbour inside it
  std::vector<Point> outerBoundary() const;
  bool onInnerBoundary(const int* p) const;
  // p outside and adjacent to the box
  bool onOuterBoundary(const int* p) const;
  FiniteSet asSet() const;
};

std::vector<Point> neighbours(const Point& p);

} // namespace lp
