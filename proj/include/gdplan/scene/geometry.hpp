#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gdplan::geom {

constexpr double kPi = 3.141592653589793238462643383279502884;

// into (-pi, pi]
inline double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  w -= kPi;
  return w == -kPi ? kPi : w;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 heading_dir(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Oriented box, center + heading, full length/width.
struct Obb {
  double x = 0.0, y = 0.0, heading = 0.0;
  double length = 1.0, width = 1.0;
};

// Signed separation along the four box axes: the largest projected gap.
// Positive means separated (by at least that much along some axis); negative
// means every axis overlaps (penetration depth = -margin).
double obb_separation(const Obb& a, const Obb& b);

inline bool obb_overlap(const Obb& a, const Obb& b) { return obb_separation(a, b) < 0.0; }

bool point_in_obb(const Obb& box, const Vec2& p);

// Even-odd point-in-polygon.
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p);
double dist_to_polygon(const std::vector<Vec2>& poly, const Vec2& p);

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// Polyline utilities. Points are ordered; arc coordinates accumulate segment
// lengths.
double polyline_length(const std::vector<Vec2>& pts);
std::vector<double> cumulative_arc(const std::vector<Vec2>& pts);

struct Projection {
  double arc_s = 0.0;    // arc-length coordinate of the foot point
  double distance = 0.0; // unsigned lateral distance
  std::size_t segment = 0;
};
Projection project_to_polyline(const std::vector<Vec2>& pts, const Vec2& p);

// Point at arc coordinate s (clamped to the ends), linear interpolation.
Vec2 sample_polyline(const std::vector<Vec2>& pts, const std::vector<double>& cum, double s);

double min_dist_to_polyline(const std::vector<Vec2>& pts, const Vec2& p);

}  // namespace gdplan::geom
