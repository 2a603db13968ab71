#include "socnav/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace socnav {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack for closed-set comparisons on rounded coordinates.
constexpr double kContactEps = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double ray_hit_circle(Vec2 origin, Vec2 dir, const Circle& c) {
  const Vec2 oc = origin - c.center();
  const double c_term = oc.norm_sq() - c.radius() * c.radius();
  if (c_term <= 0.0) return 0.0;
  const double b = oc.dot(dir);
  if (b > 0.0) return kInf;  // moving away from an outside circle
  const double disc = b * b - c_term;
  if (disc < 0.0) return kInf;
  // Numerically stable near root: c_term / (-b + sqrt(disc)).
  return c_term / (-b + std::sqrt(disc));
}

double ray_hit_segment(Vec2 origin, Vec2 dir, const Segment& s) {
  const Vec2 e = s.b() - s.a();
  const Vec2 ao = s.a() - origin;
  const double denom = dir.cross(e);
  const double scale = e.norm();
  if (std::abs(denom) <= 1e-12 * scale) {
    if (std::abs(ao.cross(dir)) > 1e-12 * std::max(1.0, ao.norm())) return kInf;
    // Collinear: nearest endpoint ahead, or 0 if the origin lies on the segment.
    const double ta = ao.dot(dir);
    const double tb = (s.b() - origin).dot(dir);
    if (ta <= 0.0 && tb >= 0.0) return 0.0;
    if (tb <= 0.0 && ta >= 0.0) return 0.0;
    const double t = std::min(ta, tb);
    return t >= 0.0 ? t : kInf;
  }
  const double t = ao.cross(e) / denom;
  const double u = ao.cross(dir) / denom;
  if (t < 0.0 || u < -kContactEps || u > 1.0 + kContactEps) return kInf;
  return t;
}

double ray_hit_rect(Vec2 origin, Vec2 dir, const OrientedRect& r) {
  const Vec2 o = r.to_local(origin);
  const Vec2 d{dir.dot(r.axis()), dir.dot(r.normal())};
  const double ext[2] = {r.half_length(), r.half_width()};
  const double oc[2] = {o.x, o.y};
  const double dc[2] = {d.x, d.y};
  double t_enter = 0.0;
  double t_exit = kInf;
  for (int k = 0; k < 2; ++k) {
    if (std::abs(dc[k]) < 1e-15) {
      if (std::abs(oc[k]) > ext[k]) return kInf;
      continue;
    }
    double t0 = (-ext[k] - oc[k]) / dc[k];
    double t1 = (ext[k] - oc[k]) / dc[k];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return kInf;
  }
  return t_enter;
}

double signed_distance_rect(Vec2 p, const OrientedRect& r) {
  const Vec2 q = r.to_local(p);
  const double dx = std::abs(q.x) - r.half_length();
  const double dy = std::abs(q.y) - r.half_width();
  const double outside = std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
  const double inside = std::min(std::max(dx, dy), 0.0);
  return outside + inside;
}

double projected_radius(const OrientedRect& r, Vec2 axis) {
  return r.half_length() * std::abs(axis.dot(r.axis())) +
         r.half_width() * std::abs(axis.dot(r.normal()));
}

}  // namespace

double normalize_angle(double angle) {
  if (angle >= -kPi && angle <= kPi) return angle;
  double a = std::remainder(angle, 2.0 * kPi);
  if (a < -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

Vec2 Vec2::normalized() const {
  const double n = norm();
  if (n <= 1e-12) return {0.0, 0.0};
  return {x / n, y / n};
}

Vec2 Vec2::rotated(double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * x - s * y, s * x + c * y};
}

Vec2 checked(Vec2 v) {
  if (!v.is_finite()) throw std::invalid_argument("non-finite vector component");
  return v;
}

Circle::Circle(Vec2 center, double radius) : center_(checked(center)), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("circle radius must be positive and finite");
  }
}

Segment::Segment(Vec2 a, Vec2 b) : a_(checked(a)), b_(checked(b)) {
  if (a_ == b_) throw std::invalid_argument("segment endpoints coincide");
}

Vec2 Segment::closest_point(Vec2 p) const {
  const Vec2 e = b_ - a_;
  const double t = std::clamp((p - a_).dot(e) / e.norm_sq(), 0.0, 1.0);
  return a_ + e * t;
}

OrientedRect::OrientedRect(Vec2 anchor, double heading, double half_width, double length)
    : anchor_(checked(anchor)),
      heading_(normalize_angle(heading)),
      half_width_(half_width),
      length_(length),
      axis_(Vec2::from_angle(heading_)) {
  if (!std::isfinite(heading) || !(half_width >= 0.0) || !(length >= 0.0) ||
      !std::isfinite(half_width) || !std::isfinite(length)) {
    throw std::invalid_argument("rectangle extents must be finite and nonnegative");
  }
}

OrientedRect OrientedRect::centered(Vec2 center, double heading, double half_length,
                                    double half_width) {
  const Vec2 axis = Vec2::from_angle(heading);
  return {center - axis * half_length, heading, half_width, 2.0 * half_length};
}

std::array<Vec2, 4> OrientedRect::corners() const {
  const Vec2 n = normal() * half_width_;
  const Vec2 front = anchor_ + axis_ * length_;
  return {anchor_ - n, front - n, front + n, anchor_ + n};
}

Vec2 OrientedRect::to_local(Vec2 p) const {
  const Vec2 d = p - center();
  return {d.dot(axis_), d.dot(normal())};
}

double signed_distance(Vec2 p, const Shape& shape) {
  return std::visit(
      Overloaded{
          [&](const Circle& c) { return (p - c.center()).norm() - c.radius(); },
          [&](const Segment& s) { return (p - s.closest_point(p)).norm(); },
          [&](const OrientedRect& r) { return signed_distance_rect(p, r); },
      },
      shape);
}

bool contains(const Shape& shape, Vec2 p) { return signed_distance(p, shape) <= 0.0; }

double ray_hit(Vec2 origin, Vec2 direction, const Shape& shape) {
  return std::visit(
      Overloaded{
          [&](const Circle& c) { return ray_hit_circle(origin, direction, c); },
          [&](const Segment& s) { return ray_hit_segment(origin, direction, s); },
          [&](const OrientedRect& r) { return ray_hit_rect(origin, direction, r); },
      },
      shape);
}

double ray_cast(Vec2 origin, Vec2 direction, std::span<const Shape> shapes,
                double max_range) {
  double best = max_range;
  for (const auto& shape : shapes) {
    const double t = ray_hit(origin, direction, shape);
    if (t < best) best = t;
  }
  return best;
}

bool rects_intersect(const OrientedRect& a, const OrientedRect& b) {
  const Vec2 delta = b.center() - a.center();
  const std::array<Vec2, 4> axes = {a.axis(), a.normal(), b.axis(), b.normal()};
  for (const Vec2& axis : axes) {
    const double gap = std::abs(delta.dot(axis));
    if (gap > projected_radius(a, axis) + projected_radius(b, axis) + kContactEps) {
      return false;
    }
  }
  return true;
}

double surface_distance(const Circle& body, const Shape& shape) {
  return signed_distance(body.center(), shape) - body.radius();
}

double closest_distance(const Circle& body, std::span<const Shape> shapes) {
  if (shapes.empty()) throw std::invalid_argument("closest_distance needs at least one shape");
  double best = kInf;
  for (const auto& shape : shapes) best = std::min(best, surface_distance(body, shape));
  return best;
}

Circle bounding_circle(const Shape& shape) {
  return std::visit(
      Overloaded{
          [](const Circle& c) { return c; },
          [](const Segment& s) {
            return Circle((s.a() + s.b()) * 0.5, 0.5 * (s.b() - s.a()).norm());
          },
          [](const OrientedRect& r) {
            return Circle(r.center(), std::max(r.bounding_radius(), 1e-9));
          },
      },
      shape);
}

}  // namespace socnav
