#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>

namespace modlab {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }
inline Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }
inline bool isFinite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

namespace detail {

// Error-free transformations (Knuth two-sum, fma two-product).
inline void twoSum(double a, double b, double& s, double& err) {
  s = a + b;
  const double bv = s - a;
  const double av = s - bv;
  err = (a - av) + (b - bv);
}

inline void twoProduct(double a, double b, double& p, double& err) {
  p = a * b;
  err = std::fma(a, b, -p);
}

// Nonoverlapping expansion with components in increasing magnitude.
struct Expansion {
  std::array<double, 16> c{};
  std::size_t n = 0;

  void grow(double b) {
    std::array<double, 16> h{};
    std::size_t m = 0;
    double q = b;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      double e = 0.0;
      twoSum(q, c[i], s, e);
      if (e != 0.0) h[m++] = e;
      q = s;
    }
    if (q != 0.0) h[m++] = q;
    c = h;
    n = m;
  }

  int sign() const {
    if (n == 0) return 0;
    return c[n - 1] > 0.0 ? 1 : (c[n - 1] < 0.0 ? -1 : 0);
  }
};

}  // namespace detail

// Exact sign of the orientation determinant of (a, b, c): +1 when c lies to
// the left of the directed line a->b, -1 to the right, 0 when collinear.
inline int orient2d(Point a, Point b, Point c) {
  const double detLeft = (a.x - c.x) * (b.y - c.y);
  const double detRight = (a.y - c.y) * (b.x - c.x);
  const double det = detLeft - detRight;
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
  const double bound = (3.0 + 16.0 * eps) * eps * (std::abs(detLeft) + std::abs(detRight));
  if (det > bound) return 1;
  if (-det > bound) return -1;

  // det = ax*by - ax*cy - ay*bx + ay*cx + bx*cy - by*cx, summed exactly.
  const std::array<std::array<double, 2>, 6> terms{{{a.x, b.y},
                                                    {-a.x, c.y},
                                                    {-a.y, b.x},
                                                    {a.y, c.x},
                                                    {b.x, c.y},
                                                    {-b.y, c.x}}};
  detail::Expansion sum;
  for (const auto& t : terms) {
    double p = 0.0;
    double e = 0.0;
    detail::twoProduct(t[0], t[1], p, e);
    if (e != 0.0) sum.grow(e);
    if (p != 0.0) sum.grow(p);
  }
  return sum.sign();
}

// True when the closed segments [p1,p2] and [q1,q2] share at least one point.
inline bool segmentsIntersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orient2d(p1, p2, q1);
  const int o2 = orient2d(p1, p2, q2);
  const int o3 = orient2d(q1, q2, p1);
  const int o4 = orient2d(q1, q2, p2);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  auto onSegment = [](Point a, Point b, Point p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
  };
  if (o1 == 0 && onSegment(p1, p2, q1)) return true;
  if (o2 == 0 && onSegment(p1, p2, q2)) return true;
  if (o3 == 0 && onSegment(q1, q2, p1)) return true;
  if (o4 == 0 && onSegment(q1, q2, p2)) return true;
  return false;
}

// Angular order of departure directions around a common origin, counted
// counterclockwise from the positive x axis. Returns true when `a` comes
// strictly before `b`. Exact.
inline bool angleLess(Point origin, Point a, Point b) {
  auto half = [&](Point p) {
    const double dy = p.y - origin.y;
    const double dx = p.x - origin.x;
    return (dy < 0.0 || (dy == 0.0 && dx < 0.0)) ? 1 : 0;
  };
  const int ha = half(a);
  const int hb = half(b);
  if (ha != hb) return ha < hb;
  return orient2d(origin, a, b) > 0;
}

// Same departure angle: collinear and pointing the same way.
inline bool sameDirection(Point origin, Point a, Point b) {
  if (orient2d(origin, a, b) != 0) return false;
  return dot(a - origin, b - origin) > 0.0;
}

// Winding number of a closed polygon around p; the polygon is closed
// implicitly from the last vertex back to the first.
inline int windingNumber(std::span<const Point> polygon, Point p) {
  int wn = 0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && orient2d(a, b, p) > 0) ++wn;
    } else {
      if (b.y <= p.y && orient2d(a, b, p) < 0) --wn;
    }
  }
  return wn;
}

inline double signedArea(std::span<const Point> polygon) {
  double area = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) area += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * area;
}

inline double pointSegmentDistance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

// Circumcenter computed relative to `a` for accuracy. Returns false for a
// (numerically) collinear triple.
inline bool circumcenter(Point a, Point b, Point c, Point& center) {
  const Point ba = b - a;
  const Point ca = c - a;
  const double d = 2.0 * cross(ba, ca);
  if (d == 0.0 || orient2d(a, b, c) == 0) return false;
  const double lb = dot(ba, ba);
  const double lc = dot(ca, ca);
  center = {a.x + (ca.y * lb - ba.y * lc) / d, a.y + (ba.x * lc - ca.x * lb) / d};
  return isFinite(center);
}

inline double angleOf(Point d) {
  double t = std::atan2(d.y, d.x);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  return t;
}

}  // namespace modlab
