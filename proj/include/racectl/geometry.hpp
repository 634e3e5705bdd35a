#pragma once

// Small 2D vector / angle helpers shared by every module.

#include <cmath>

namespace racectl {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x{0.0};  // m
  double y{0.0};  // m

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
};

inline Vec2 operator*(double k, const Vec2& v) { return {k * v.x, k * v.y}; }

// Unit vector for a heading angle (rad, CCW from +x).
inline Vec2 heading_dir(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

struct Pose {
  Vec2 pos;
  double heading{0.0};  // rad, CCW from +x
};

}  // namespace racectl
