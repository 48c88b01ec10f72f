#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace flatbundle {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }

  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle wrapped into [0, period).
inline double wrap_angle(double a, double period = kTwoPi) {
  double r = std::fmod(a, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

// Counterclockwise angle from a to b in [0, 2pi).
inline double ccw_angle(Vec2 a, Vec2 b) { return wrap_angle(std::atan2(cross(a, b), dot(a, b))); }

// Real 2x2 matrix acting on holonomy vectors (column convention).
struct Mat2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  static constexpr Mat2 identity() { return {}; }
  static Mat2 rotation(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }
  static constexpr Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  // Inverse assuming det == 1.
  constexpr Mat2 inverse_sl2() const { return {d, -b, -c, a}; }
  Mat2 inverse() const {
    const double k = det();
    return {d / k, -b / k, -c / k, a / k};
  }
  double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }
  // Operator 2-norm (largest singular value).
  double op_norm() const {
    const double f2 = a * a + b * b + c * c + d * d;
    const double dt = std::abs(det());
    return std::sqrt(0.5 * (f2 + std::sqrt(std::max(0.0, f2 * f2 - 4.0 * dt * dt))));
  }
};

inline double max_abs_diff(const Mat2& m, const Mat2& n) {
  return std::max({std::abs(m.a - n.a), std::abs(m.b - n.b), std::abs(m.c - n.c), std::abs(m.d - n.d)});
}

// Equality in PSL2: up to a global sign.
inline bool psl_equal(const Mat2& m, const Mat2& n, double tol) {
  const Mat2 neg{-n.a, -n.b, -n.c, -n.d};
  return max_abs_diff(m, n) <= tol || max_abs_diff(m, neg) <= tol;
}

}  // namespace flatbundle
