#include "gdplan/scene/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace gdplan::geom {

namespace {

std::array<Vec2, 4> obb_corners(const Obb& b) {
  const Vec2 fwd = heading_dir(b.heading);
  const Vec2 left{-fwd.y, fwd.x};
  const Vec2 c{b.x, b.y};
  const Vec2 dl = fwd * (0.5 * b.length);
  const Vec2 dw = left * (0.5 * b.width);
  return {c + dl + dw, c + dl - dw, c - dl - dw, c - dl + dw};
}

}  // namespace

double obb_separation(const Obb& a, const Obb& b) {
  const auto ca = obb_corners(a);
  const auto cb = obb_corners(b);
  const std::array<Vec2, 4> axes = {heading_dir(a.heading),
                                    Vec2{-std::sin(a.heading), std::cos(a.heading)},
                                    heading_dir(b.heading),
                                    Vec2{-std::sin(b.heading), std::cos(b.heading)}};
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& axis : axes) {
    double amin = std::numeric_limits<double>::infinity(), amax = -amin;
    double bmin = amin, bmax = -amin;
    for (const Vec2& p : ca) {
      const double v = p.dot(axis);
      amin = std::min(amin, v);
      amax = std::max(amax, v);
    }
    for (const Vec2& p : cb) {
      const double v = p.dot(axis);
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    }
    const double gap = std::max(bmin - amax, amin - bmax);
    best = std::max(best, gap);
  }
  return best;
}

bool point_in_obb(const Obb& box, const Vec2& p) {
  const Vec2 d = rotate(Vec2{p.x - box.x, p.y - box.y}, -box.heading);
  return std::fabs(d.x) <= 0.5 * box.length && std::fabs(d.y) <= 0.5 * box.width;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double dist_to_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  if (point_in_polygon(poly, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    best = std::min(best, dist_point_segment(p, poly[j], poly[i]));
  return best;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 <= 0.0) return (p - a).norm();
  double t = (p - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

double polyline_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

std::vector<double> cumulative_arc(const std::vector<Vec2>& pts) {
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  return cum;
}

Projection project_to_polyline(const std::vector<Vec2>& pts, const Vec2& p) {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 b = pts[i + 1];
    const Vec2 ab = b - a;
    const double seg_len = ab.norm();
    double t = 0.0;
    if (seg_len > 0.0) t = std::clamp((p - a).dot(ab) / (seg_len * seg_len), 0.0, 1.0);
    const double d = (p - (a + ab * t)).norm();
    if (d < best.distance) {
      best.distance = d;
      best.arc_s = arc + t * seg_len;
      best.segment = i;
    }
    arc += seg_len;
  }
  if (pts.size() == 1) {
    best.distance = (p - pts[0]).norm();
    best.arc_s = 0.0;
  }
  return best;
}

Vec2 sample_polyline(const std::vector<Vec2>& pts, const std::vector<double>& cum, double s) {
  if (pts.empty()) return {};
  if (s <= 0.0) return pts.front();
  if (s >= cum.back()) return pts.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double seg = cum[i] - cum[i - 1];
  const double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return pts[i - 1] + (pts[i] - pts[i - 1]) * t;
}

double min_dist_to_polyline(const std::vector<Vec2>& pts, const Vec2& p) {
  return project_to_polyline(pts, p).distance;
}

}  // namespace gdplan::geom
