#pragma once
/**
 * @file geometry.hpp
 * @brief Exact 2D primitives used by the scanner, reward and crowd code.
 *
 * Shapes are closed solids: a point on the boundary is inside, touching
 * shapes intersect, and a ray starting inside a solid hits at distance 0.
 * All headings are kept in [-pi, pi].
 */

#include <cmath>
#include <array>
#include <numbers>
#include <span>
#include <variant>

namespace socnav {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into [-pi, pi].
double normalize_angle(double angle);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  /// z-component of the 3D cross product.
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  constexpr double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  /// Unit vector, or {0, 0} for a (near) zero vector.
  Vec2 normalized() const;
  /// Counter-clockwise perpendicular.
  constexpr Vec2 perp() const { return {-y, x}; }
  Vec2 rotated(double angle) const;
  double angle() const { return std::atan2(y, x); }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }

  static Vec2 from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Throws std::invalid_argument on NaN/Inf components.
Vec2 checked(Vec2 v);

class Circle {
 public:
  /// Throws std::invalid_argument unless radius > 0 and the center is finite.
  Circle(Vec2 center, double radius);

  Vec2 center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Vec2 center_;
  double radius_;
};

class Segment {
 public:
  /// Throws std::invalid_argument when a == b.
  Segment(Vec2 a, Vec2 b);

  Vec2 a() const { return a_; }
  Vec2 b() const { return b_; }
  Vec2 closest_point(Vec2 p) const;

 private:
  Vec2 a_;
  Vec2 b_;
};

/**
 * Rectangle attached to an anchor point: it spans [0, length] along the
 * heading direction and [-half_width, half_width] across it. Social zones use
 * the anchor as the agent center; static boxes are built with centered().
 */
class OrientedRect {
 public:
  OrientedRect(Vec2 anchor, double heading, double half_width, double length);

  /// Box centered at `center` with the given half extents along/across heading.
  static OrientedRect centered(Vec2 center, double heading, double half_length,
                               double half_width);

  Vec2 anchor() const { return anchor_; }
  double heading() const { return heading_; }
  double half_width() const { return half_width_; }
  double length() const { return length_; }

  Vec2 axis() const { return axis_; }      ///< unit vector along heading
  Vec2 normal() const { return axis_.perp(); }
  Vec2 center() const { return anchor_ + axis_ * (0.5 * length_); }
  double half_length() const { return 0.5 * length_; }
  double bounding_radius() const { return std::hypot(half_length(), half_width_); }

  /// Corners in counter-clockwise order starting at the rear right corner.
  std::array<Vec2, 4> corners() const;

  /// Coordinates of p in the frame centered on center() with axis() as x.
  Vec2 to_local(Vec2 p) const;

 private:
  Vec2 anchor_;
  double heading_;
  double half_width_;
  double length_;
  Vec2 axis_;
};

using Shape = std::variant<Circle, Segment, OrientedRect>;

/// Signed distance from p to the shape surface; negative inside the solid.
double signed_distance(Vec2 p, const Shape& shape);

bool contains(const Shape& shape, Vec2 p);

/// Distance along the ray to the first contact with `shape`, or +inf.
double ray_hit(Vec2 origin, Vec2 direction, const Shape& shape);

/// Smallest nonnegative hit distance over all shapes, capped at max_range.
double ray_cast(Vec2 origin, Vec2 direction, std::span<const Shape> shapes,
                double max_range);

/// Closed-set overlap test by separating axes.
bool rects_intersect(const OrientedRect& a, const OrientedRect& b);

/// Surface-to-surface distance; negative values are penetration depth.
double surface_distance(const Circle& body, const Shape& shape);

/**
 * Minimum surface distance between `body` and any shape. Throws
 * std::invalid_argument for an empty shape list; callers decide what "no
 * neighbors" means before calling.
 */
double closest_distance(const Circle& body, std::span<const Shape> shapes);

/// Bounding circle of any shape (segments use their midpoint).
Circle bounding_circle(const Shape& shape);

}  // namespace socnav
