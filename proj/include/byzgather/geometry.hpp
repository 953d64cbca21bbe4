/*
 * Copyright (c) 2026, the byzgather authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BYZGATHER_GEOMETRY_HPP_
#define BYZGATHER_GEOMETRY_HPP_

#include <algorithm>
#include <compare>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "byzgather/rational.hpp"

namespace byzgather {

/**
 * A point of the plane in the global frame. Comparison is exact and
 * lexicographic (x first), which is the deterministic tie-break order used
 * throughout the library.
 */
struct Point {
  Rational x;
  Rational y;

  friend bool operator==(const Point& a, const Point& b) = default;
  friend std::strong_ordering operator<=>(const Point& a, const Point& b) {
    if (a.x < b.x) return std::strong_ordering::less;
    if (b.x < a.x) return std::strong_ordering::greater;
    if (a.y < b.y) return std::strong_ordering::less;
    if (b.y < a.y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }

  std::string str() const {
    return "(" + rational_to_string(x) + ", " + rational_to_string(y) + ")";
  }
};

inline Point point_of_int(long px, long py) { return {Rational(px), Rational(py)}; }

/**
 * Multiset of locations, kept sorted so that two multisets are equal iff
 * their representations are equal. Multiplicity queries are exact.
 */
class LocationMultiset {
 public:
  LocationMultiset() = default;
  explicit LocationMultiset(std::vector<Point> pts) : pts_(std::move(pts)) {
    std::sort(pts_.begin(), pts_.end());
  }

  const std::vector<Point>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }

  std::size_t count(const Point& p) const {
    auto [lo, hi] = std::equal_range(pts_.begin(), pts_.end(), p);
    return static_cast<std::size_t>(hi - lo);
  }

  bool contains(const Point& p) const { return count(p) > 0; }

  void add(const Point& p) { pts_.insert(std::upper_bound(pts_.begin(), pts_.end(), p), p); }

  // Multiset intersection cardinality: sum over distinct points of
  // min(multiplicity here, multiplicity there).
  std::size_t intersection_size(const LocationMultiset& other) const {
    std::size_t n = 0, i = 0, j = 0;
    while (i < pts_.size() && j < other.pts_.size()) {
      if (pts_[i] < other.pts_[j]) {
        ++i;
      } else if (other.pts_[j] < pts_[i]) {
        ++j;
      } else {
        ++n;
        ++i;
        ++j;
      }
    }
    return n;
  }

  std::vector<Point> distinct() const {
    std::vector<Point> d;
    for (const auto& p : pts_) {
      if (d.empty() || !(d.back() == p)) d.push_back(p);
    }
    return d;
  }

  LocationMultiset translated(const Point& t) const {
    std::vector<Point> pts;
    pts.reserve(pts_.size());
    for (const auto& p : pts_) pts.push_back(p + t);
    return LocationMultiset(std::move(pts));  // translation preserves order
  }

  friend bool operator==(const LocationMultiset& a, const LocationMultiset& b) = default;

 private:
  std::vector<Point> pts_;
};

/**
 * The most crowded point of a non-empty multiset together with its
 * multiplicity. Ties are broken by the lexicographic minimum, so the result
 * is deterministic and commutes with translation.
 */
inline std::pair<Point, std::size_t> max_multiplicity(const LocationMultiset& m) {
  if (m.empty()) throw std::invalid_argument("max_multiplicity: empty multiset");
  const auto& pts = m.points();
  Point best = pts[0];
  std::size_t best_count = 0, i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j < pts.size() && pts[j] == pts[i]) ++j;
    if (j - i > best_count) {
      best = pts[i];
      best_count = j - i;
    }
    i = j;
  }
  return {best, best_count};
}

// Twice the signed area of the triangle (a, b, c). Zero iff collinear.
inline Rational cross(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool collinear(const Point& a, const Point& b, const Point& c) {
  return cross(a, b, c) == 0;
}

/** Line in normalized homogeneous form a*x + b*y + c = 0. */
struct Line {
  Rational a, b, c;

  friend bool operator==(const Line&, const Line&) = default;
  friend std::strong_ordering operator<=>(const Line& u, const Line& v) {
    if (u.a != v.a) return u.a < v.a ? std::strong_ordering::less : std::strong_ordering::greater;
    if (u.b != v.b) return u.b < v.b ? std::strong_ordering::less : std::strong_ordering::greater;
    if (u.c != v.c) return u.c < v.c ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  bool contains(const Point& p) const { return a * p.x + b * p.y + c == 0; }

  std::string str() const {
    return rational_to_string(a) + "*x + " + rational_to_string(b) + "*y + " +
           rational_to_string(c) + " = 0";
  }
};

// Canonical line through two distinct points: coefficients are scaled so the
// first nonzero of (a, b) equals 1. Equal lines always canonicalize equally.
inline Line line_through(const Point& p, const Point& q) {
  if (p == q) throw std::invalid_argument("line_through: identical points");
  Rational a = q.y - p.y;
  Rational b = p.x - q.x;
  Rational c = -(a * p.x + b * p.y);
  Rational scale = (a != 0) ? a : b;
  return Line{a / scale, b / scale, c / scale};
}

/** Circle as (center, squared radius); r2 > 0 for genuine circles. */
struct Circle {
  Point center;
  Rational r2;

  friend bool operator==(const Circle&, const Circle&) = default;
  friend std::strong_ordering operator<=>(const Circle& u, const Circle& v) {
    auto c = u.center <=> v.center;
    if (c != std::strong_ordering::equal) return c;
    if (u.r2 != v.r2) return u.r2 < v.r2 ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  bool contains(const Point& p) const {
    Rational dx = p.x - center.x, dy = p.y - center.y;
    return dx * dx + dy * dy == r2;
  }

  std::string str() const {
    return "circle(center=" + center.str() + ", r2=" + rational_to_string(r2) + ")";
  }
};

// Circumcircle of three points; nullopt when they are collinear or not all
// distinct. A line is never treated as a degenerate circle.
inline std::optional<Circle> circle_through(const Point& p, const Point& q, const Point& r) {
  if (p == q || q == r || p == r) return std::nullopt;
  if (collinear(p, q, r)) return std::nullopt;
  // Perpendicular bisector equations, solved by Cramer's rule.
  Rational a1 = 2 * (q.x - p.x), b1 = 2 * (q.y - p.y);
  Rational c1 = q.x * q.x - p.x * p.x + q.y * q.y - p.y * p.y;
  Rational a2 = 2 * (r.x - p.x), b2 = 2 * (r.y - p.y);
  Rational c2 = r.x * r.x - p.x * p.x + r.y * r.y - p.y * p.y;
  Rational det = a1 * b2 - a2 * b1;
  Point center{(c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det};
  Rational dx = p.x - center.x, dy = p.y - center.y;
  return Circle{center, dx * dx + dy * dy};
}

// Orthogonal projection of p onto the line; exact.
inline Point project_onto_line(const Line& l, const Point& p) {
  Rational n2 = l.a * l.a + l.b * l.b;
  Rational d = (l.a * p.x + l.b * p.y + l.c) / n2;
  return {p.x - l.a * d, p.y - l.b * d};
}

}  // namespace byzgather

#endif  // BYZGATHER_GEOMETRY_HPP_
