#pragma once
// Brute-force reference implementations used by the unit tests and the
// acceptance binary. They share no code with the library beyond the shape
// accessors, so agreement is evidence rather than tautology.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <variant>
#include <vector>

#include "socnav/crowd.hpp"
#include "socnav/geometry.hpp"
#include "socnav/rewards.hpp"

namespace oracle {

using socnav::Circle;
using socnav::OrientedRect;
using socnav::Segment;
using socnav::Shape;
using socnav::Vec2;

inline std::array<Vec2, 4> rect_corners(const OrientedRect& r) {
  const double c = std::cos(r.heading());
  const double s = std::sin(r.heading());
  const Vec2 ax{c, s};
  const Vec2 nx{-s, c};
  const Vec2 a = r.anchor();
  const double w = r.half_width();
  const double l = r.length();
  return {a - nx * w, a + ax * l - nx * w, a + ax * l + nx * w, a + nx * w};
}

inline double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Point inside a convex counter-clockwise polygon, boundary included.
inline bool in_polygon(const std::array<Vec2, 4>& poly, Vec2 p, double slack = 0.0) {
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % 4];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (cross(a, b, p) < -slack * len) return false;
  }
  return true;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

/// Unsigned distance from p to the boundary of a shape.
inline double boundary_distance(Vec2 p, const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    return std::abs(std::hypot(p.x - c->center().x, p.y - c->center().y) - c->radius());
  }
  if (const auto* s = std::get_if<Segment>(&shape)) {
    return point_segment_distance(p, s->a(), s->b());
  }
  const auto poly = rect_corners(std::get<OrientedRect>(shape));
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % 4]));
  return best;
}

/// Solid interior test; segments are treated as having no interior.
inline bool inside(Vec2 p, const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    return std::hypot(p.x - c->center().x, p.y - c->center().y) <= c->radius();
  }
  if (std::holds_alternative<Segment>(shape)) return false;
  return in_polygon(rect_corners(std::get<OrientedRect>(shape)), p);
}

/// Distance from p to the solid (0 inside).
inline double solid_distance(Vec2 p, const Shape& shape) {
  return inside(p, shape) ? 0.0 : boundary_distance(p, shape);
}

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

/// True when the short path prev -> p touches the shape.
inline bool step_touches(Vec2 prev, Vec2 p, const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    return point_segment_distance(c->center(), prev, p) <= c->radius();
  }
  if (const auto* s = std::get_if<Segment>(&shape)) return segments_cross(prev, p, s->a(), s->b());
  const auto poly = rect_corners(std::get<OrientedRect>(shape));
  if (in_polygon(poly, p)) return true;
  for (int i = 0; i < 4; ++i) {
    if (segments_cross(prev, p, poly[i], poly[(i + 1) % 4])) return true;
  }
  return false;
}

/**
 * Marches along the ray in fixed steps and reports the end of the first step
 * that touches a shape, so the answer overshoots by at most one step.
 */
inline double march_ray(Vec2 origin, Vec2 dir, std::span<const Shape> shapes, double max_range,
                        double step = 1e-4) {
  const double n = std::hypot(dir.x, dir.y);
  dir = Vec2{dir.x / n, dir.y / n};
  for (const Shape& s : shapes) {
    if (inside(origin, s)) return 0.0;
  }
  Vec2 prev = origin;
  const long steps = static_cast<long>(std::ceil(max_range / step));
  for (long k = 1; k <= steps; ++k) {
    const double t = std::min(max_range, k * step);
    const Vec2 p{origin.x + dir.x * t, origin.y + dir.y * t};
    for (const Shape& s : shapes) {
      if (step_touches(prev, p, s)) return t;
    }
    prev = p;
  }
  return max_range;
}

/// Exact convex overlap: a corner inside the other polygon or two edges crossing.
inline bool polygons_overlap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  for (const Vec2& p : a) if (in_polygon(b, p)) return true;
  for (const Vec2& p : b) if (in_polygon(a, p)) return true;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (segments_cross(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4])) return true;
    }
  }
  return false;
}

/// Smallest distance between the two outlines; zero when they touch or cross.
inline double outline_gap(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (segments_cross(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4])) return 0.0;
      best = std::min(best, point_segment_distance(a[i], b[j], b[(j + 1) % 4]));
      best = std::min(best, point_segment_distance(b[j], a[i], a[(i + 1) % 4]));
    }
  }
  return best;
}

/// Monte-Carlo containment: true when a sample lands in both rectangles.
template <class Rng>
inline bool sampled_overlap(const OrientedRect& a, const OrientedRect& b, int samples, Rng& rng) {
  const auto pa = rect_corners(a);
  const auto pb = rect_corners(b);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < samples; ++k) {
    // Uniform point in `a` from its own frame.
    const double s = u(rng);
    const double t = u(rng);
    const Vec2 p = pa[0] + (pa[1] - pa[0]) * s + (pa[3] - pa[0]) * t;
    if (in_polygon(pb, p)) return true;
  }
  return false;
}

/// Closest surface distance by sampling the shape boundary densely.
inline double sampled_surface_distance(const Circle& body, const Shape& shape,
                                       int samples = 200000) {
  const Vec2 c = body.center();
  if (inside(c, shape)) return -1.0;  // caller only compares non-penetrating cases
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](Vec2 p) { best = std::min(best, std::hypot(p.x - c.x, p.y - c.y)); };
  if (const auto* circ = std::get_if<Circle>(&shape)) {
    for (int k = 0; k < samples; ++k) {
      const double a = 2.0 * socnav::kPi * k / samples;
      visit(circ->center() + Vec2{std::cos(a), std::sin(a)} * circ->radius());
    }
  } else if (const auto* seg = std::get_if<Segment>(&shape)) {
    for (int k = 0; k <= samples; ++k) {
      const double t = static_cast<double>(k) / samples;
      visit(seg->a() + (seg->b() - seg->a()) * t);
    }
  } else {
    const auto poly = rect_corners(std::get<OrientedRect>(shape));
    const int per_edge = samples / 4;
    for (int i = 0; i < 4; ++i) {
      for (int k = 0; k <= per_edge; ++k) {
        const double t = static_cast<double>(k) / per_edge;
        visit(poly[i] + (poly[(i + 1) % 4] - poly[i]) * t);
      }
    }
  }
  return best - body.radius();
}

/**
 * Breadth-first search on an occupancy grid of `resolution`. A cell is free
 * when its center lies at least `clearance` from every shape.
 */
inline bool grid_path_exists(std::span<const Shape> shapes, Vec2 center, Vec2 half_extent,
                             Vec2 start, Vec2 goal, double clearance, double resolution) {
  const int nx = static_cast<int>(std::floor(2.0 * half_extent.x / resolution)) + 1;
  const int ny = static_cast<int>(std::floor(2.0 * half_extent.y / resolution)) + 1;
  const Vec2 origin{center.x - half_extent.x, center.y - half_extent.y};
  std::vector<char> free(static_cast<std::size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Vec2 p{origin.x + i * resolution, origin.y + j * resolution};
      bool ok = true;
      for (const Shape& s : shapes) {
        if (solid_distance(p, s) < clearance) { ok = false; break; }
      }
      free[static_cast<std::size_t>(j) * nx + i] = ok;
    }
  }
  const auto cell = [&](Vec2 p) {
    const int i = std::clamp(static_cast<int>(std::lround((p.x - origin.x) / resolution)), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::lround((p.y - origin.y) / resolution)), 0, ny - 1);
    return j * nx + i;
  };
  const int s = cell(start);
  const int g = cell(goal);
  if (!free[s] || !free[g]) return false;
  std::vector<char> seen(free.size(), 0);
  std::queue<int> q;
  q.push(s);
  seen[s] = 1;
  while (!q.empty()) {
    const int k = q.front();
    q.pop();
    if (k == g) return true;
    const int i = k % nx;
    const int j = k / nx;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d];
      const int b = j + dj[d];
      if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
      const int n = b * nx + a;
      if (free[n] && !seen[n]) {
        seen[n] = 1;
        q.push(n);
      }
    }
  }
  return false;
}

/// Social-zone violations counted pedestrian by pedestrian with exact polygon overlap.
inline int brute_force_violations(const OrientedRect& robot_zone, Vec2 robot_position,
                                  std::span<const socnav::Pedestrian> peds,
                                  const socnav::RewardParams& params) {
  const auto rz = rect_corners(robot_zone);
  int count = 0;
  for (const auto& p : peds) {
    const double d = std::hypot(p.position.x - robot_position.x, p.position.y - robot_position.y);
    if (d > params.social_radius) continue;
    if (polygons_overlap(rz, rect_corners(socnav::pedestrian_zone(p, params)))) ++count;
  }
  return count;
}

}  // namespace oracle
