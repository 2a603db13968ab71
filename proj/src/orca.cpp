// ORCA velocity selection. The linear programs follow the published RVO2
// formulation: a line is satisfied when the velocity lies on its left side.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "socnav/crowd.hpp"

namespace socnav {

namespace {

constexpr double kLpEps = 1e-9;

struct Line {
  Vec2 point;
  Vec2 direction;  // unit
};

double det(Vec2 a, Vec2 b) { return a.cross(b); }

bool linear_program1(const std::vector<Line>& lines, std::size_t line_no, double radius,
                     Vec2 opt_velocity, bool direction_opt, Vec2& result) {
  const Line& line = lines[line_no];
  const double dot = line.point.dot(line.direction);
  const double discriminant = dot * dot + radius * radius - line.point.norm_sq();
  if (discriminant < 0.0) return false;  // speed circle misses the line

  const double sqrt_disc = std::sqrt(discriminant);
  double t_left = -dot - sqrt_disc;
  double t_right = -dot + sqrt_disc;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denominator = det(line.direction, lines[i].direction);
    const double numerator = det(lines[i].direction, line.point - lines[i].point);
    if (std::abs(denominator) <= kLpEps) {
      if (numerator < 0.0) return false;  // parallel and infeasible
      continue;
    }
    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = opt_velocity.dot(line.direction) > 0.0 ? line.point + line.direction * t_right
                                                    : line.point + line.direction * t_left;
  } else {
    const double t = line.direction.dot(opt_velocity - line.point);
    result = line.point + line.direction * std::clamp(t, t_left, t_right);
  }
  return true;
}

std::size_t linear_program2(const std::vector<Line>& lines, double radius, Vec2 opt_velocity,
                            bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt_velocity * radius;
  } else if (opt_velocity.norm_sq() > radius * radius) {
    result = opt_velocity.normalized() * radius;
  } else {
    result = opt_velocity;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) > 0.0) {
      const Vec2 previous = result;
      if (!linear_program1(lines, i, radius, opt_velocity, direction_opt, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

void linear_program3(const std::vector<Line>& lines, std::size_t obstacle_lines,
                     std::size_t begin_line, double radius, Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin_line; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) <= distance) continue;

    std::vector<Line> projected(lines.begin(),
                                lines.begin() + static_cast<std::ptrdiff_t>(obstacle_lines));
    for (std::size_t j = obstacle_lines; j < i; ++j) {
      Line line;
      const double determinant = det(lines[i].direction, lines[j].direction);
      if (std::abs(determinant) <= kLpEps) {
        if (lines[i].direction.dot(lines[j].direction) > 0.0) continue;  // same direction
        line.point = (lines[i].point + lines[j].point) * 0.5;
      } else {
        line.point = lines[i].point +
                     lines[i].direction *
                         (det(lines[j].direction, lines[i].point - lines[j].point) / determinant);
      }
      line.direction = (lines[j].direction - lines[i].direction).normalized();
      projected.push_back(line);
    }

    const Vec2 previous = result;
    if (linear_program2(projected, radius, Vec2(-lines[i].direction.y, lines[i].direction.x),
                        true, result) < projected.size()) {
      // Only reachable through rounding; keep the last feasible answer.
      result = previous;
    }
    distance = det(lines[i].direction, lines[i].point - result);
  }
}

// Closest surface point data for one convex obstacle, seen from p.
// `toward` points from p to the obstacle; `gap` is the signed center clearance.
struct Support {
  Vec2 toward;
  double gap;
};

Support support_of(Vec2 p, const Shape& shape) {
  if (const auto* c = std::get_if<Circle>(&shape)) {
    const Vec2 d = c->center() - p;
    const double n = d.norm();
    return {n > 1e-12 ? d / n : Vec2(1.0, 0.0), n - c->radius()};
  }
  if (const auto* s = std::get_if<Segment>(&shape)) {
    const Vec2 d = s->closest_point(p) - p;
    const double n = d.norm();
    const Vec2 e = (s->b() - s->a()).normalized();
    return {n > 1e-12 ? d / n : e.perp(), n};
  }
  const auto& r = std::get<OrientedRect>(shape);
  const Vec2 q = r.to_local(p);
  const double hl = r.half_length();
  const double hw = r.half_width();
  if (std::abs(q.x) <= hl && std::abs(q.y) <= hw) {
    // Inside: push out through the nearest face.
    const double fx = hl - std::abs(q.x);
    const double fy = hw - std::abs(q.y);
    const Vec2 outward = fx < fy ? r.axis() * (q.x >= 0.0 ? 1.0 : -1.0)
                                 : r.normal() * (q.y >= 0.0 ? 1.0 : -1.0);
    return {-outward, -std::min(fx, fy)};
  }
  const Vec2 clamped{std::clamp(q.x, -hl, hl), std::clamp(q.y, -hw, hw)};
  const Vec2 local = clamped - q;
  const Vec2 d = r.axis() * local.x + r.normal() * local.y;
  const double n = d.norm();
  return {d / n, n};
}

}  // namespace

Vec2 preferred_velocity(const Pedestrian& self, double dt) {
  if (self.behavior.stopped) return {};
  const Vec2 to_goal = self.goal - self.position;
  const double dist = to_goal.norm();
  if (dist <= 1e-9) return {};
  const double speed = std::min(self.pref_speed, dist / dt);
  return to_goal * (speed / dist);
}

Vec2 orca_velocity(const Pedestrian& self, std::span<const Pedestrian> neighbors,
                   std::span<const Shape> obstacles, const OrcaParams& params, double dt) {
  std::vector<Line> lines;
  const double radius = self.radius;
  const Vec2 velocity = self.velocity;

  // Obstacles: v . n <= gap / tau keeps the body on this side of the supporting
  // line at the closest point, which bounds the whole convex obstacle.
  const double obstacle_range = params.time_horizon_obstacles * self.pref_speed + radius;
  for (const Shape& shape : obstacles) {
    const Support s = support_of(self.position, shape);
    if (s.gap > obstacle_range) continue;
    const double clearance = s.gap - radius;
    const double tau = clearance > 0.0 ? params.time_horizon_obstacles : dt;
    Line line;
    line.point = s.toward * (clearance / tau);
    line.direction = s.toward.perp();
    lines.push_back(line);
  }
  const std::size_t obstacle_lines = lines.size();

  // Nearest agents first, capped at max_neighbors.
  std::vector<std::pair<double, const Pedestrian*>> near;
  const double range_sq = params.neighbor_distance * params.neighbor_distance;
  for (const Pedestrian& other : neighbors) {
    if (other.id == self.id) continue;
    const double d2 = (other.position - self.position).norm_sq();
    if (d2 < range_sq) near.emplace_back(d2, &other);
  }
  std::stable_sort(near.begin(), near.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (static_cast<int>(near.size()) > params.max_neighbors) {
    near.resize(static_cast<std::size_t>(std::max(params.max_neighbors, 0)));
  }

  const double inv_horizon = 1.0 / params.time_horizon;
  for (const auto& [dist_sq, other] : near) {
    const Vec2 rel_pos = other->position - self.position;
    const Vec2 rel_vel = velocity - other->velocity;
    const double combined = radius + other->radius;
    const double combined_sq = combined * combined;
    Line line;
    Vec2 u;
    if (dist_sq > combined_sq) {
      const Vec2 w = rel_vel - rel_pos * inv_horizon;  // from cutoff center
      const double w_len_sq = w.norm_sq();
      const double dot = w.dot(rel_pos);
      if (dot < 0.0 && dot * dot > combined_sq * w_len_sq) {
        const double w_len = std::sqrt(w_len_sq);
        const Vec2 unit_w = w / w_len;
        line.direction = Vec2(unit_w.y, -unit_w.x);
        u = unit_w * (combined * inv_horizon - w_len);
      } else {
        const double leg = std::sqrt(dist_sq - combined_sq);
        if (det(rel_pos, w) > 0.0) {
          line.direction = Vec2(rel_pos.x * leg - rel_pos.y * combined,
                                rel_pos.x * combined + rel_pos.y * leg) /
                           dist_sq;
        } else {
          line.direction = -Vec2(rel_pos.x * leg + rel_pos.y * combined,
                                 -rel_pos.x * combined + rel_pos.y * leg) /
                           dist_sq;
        }
        u = line.direction * rel_vel.dot(line.direction) - rel_vel;
      }
    } else {
      // Already overlapping: resolve within one step.
      const double inv_dt = 1.0 / dt;
      const Vec2 w = rel_vel - rel_pos * inv_dt;
      const double w_len = w.norm();
      const Vec2 unit_w = w_len > 1e-12 ? w / w_len : (-rel_pos).normalized();
      line.direction = Vec2(unit_w.y, -unit_w.x);
      u = unit_w * (combined * inv_dt - w_len);
    }
    line.point = velocity + u * 0.5;
    lines.push_back(line);
  }

  Vec2 result;
  const Vec2 preferred = preferred_velocity(self, dt);
  const std::size_t fail = linear_program2(lines, self.pref_speed, preferred, false, result);
  if (fail < lines.size()) {
    linear_program3(lines, obstacle_lines, fail, self.pref_speed, result);
  }
  // Guard the speed bound against rounding in the projections.
  const double speed = result.norm();
  if (speed > self.pref_speed) result = result * (self.pref_speed / speed);
  return result;
}

}  // namespace socnav
