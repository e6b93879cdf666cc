#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rankone {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

/// Reduce an angle difference to (-pi, pi].
inline double wrap_pi(double d) {
  double r = wrap_angle(d + kPi) - kPi;
  return r == -kPi ? kPi : r;
}

/// Geodesic distance on the circle of length 2*pi.
inline double circle_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr double trace() const { return a11 + a22; }
  constexpr Mat2 transpose() const { return {a11, a21, a12, a22}; }
  constexpr Vec2 col(int j) const { return j == 0 ? Vec2{a11, a21} : Vec2{a12, a22}; }
};

constexpr Vec2 operator*(const Mat2& m, Vec2 v) {
  return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}
constexpr Mat2 operator*(const Mat2& m, const Mat2& n) {
  return {m.a11 * n.a11 + m.a12 * n.a21, m.a11 * n.a12 + m.a12 * n.a22,
          m.a21 * n.a11 + m.a22 * n.a21, m.a21 * n.a12 + m.a22 * n.a22};
}
constexpr Mat2 operator-(const Mat2& m, const Mat2& n) {
  return {m.a11 - n.a11, m.a12 - n.a12, m.a21 - n.a21, m.a22 - n.a22};
}
constexpr Mat2 operator+(const Mat2& m, const Mat2& n) {
  return {m.a11 + n.a11, m.a12 + n.a12, m.a21 + n.a21, m.a22 + n.a22};
}
constexpr Mat2 operator*(double s, const Mat2& m) {
  return {s * m.a11, s * m.a12, s * m.a21, s * m.a22};
}

/// Solves m x = b by Cramer's rule; the caller checks det != 0.
constexpr Vec2 solve(const Mat2& m, Vec2 b) {
  const double d = m.det();
  return {(b.x * m.a22 - m.a12 * b.y) / d, (m.a11 * b.y - m.a21 * b.x) / d};
}

/// log|det m| without forming tiny products; -inf for singular m.
inline double log_abs_det(const Mat2& m) {
  const double s = std::max(std::abs(m.a11), std::abs(m.a12));
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  const double d = (m.a11 / s) * m.a22 - (m.a12 / s) * m.a21;
  return std::log(s) + std::log(std::abs(d));
}

/// Real spectral data of a 2x2 matrix. `real` is false for complex pairs.
struct Eigen2 {
  bool real = false;
  double lambda1 = 0.0;  // smaller
  double lambda2 = 0.0;  // larger
  Vec2 v1;
  Vec2 v2;
};

inline Vec2 eigenvector_for(const Mat2& m, double lambda) {
  // Null vector of (m - lambda I); pick the better-conditioned row.
  const Vec2 r1{m.a11 - lambda, m.a12};
  const Vec2 r2{m.a21, m.a22 - lambda};
  const Vec2 r = norm(r1) >= norm(r2) ? r1 : r2;
  Vec2 v = norm(r) == 0.0 ? Vec2{1.0, 0.0} : Vec2{-r.y, r.x};
  return v / norm(v);
}

inline Eigen2 eigen(const Mat2& m) {
  Eigen2 out;
  const double tr = m.trace();
  const double disc = 0.25 * tr * tr - m.det();
  if (disc < 0.0) return out;
  out.real = true;
  const double s = std::sqrt(disc);
  // Stable pairing: compute the larger-magnitude root first.
  const double big = 0.5 * tr + (tr >= 0.0 ? s : -s);
  const double small = big != 0.0 ? m.det() / big : 0.0;
  out.lambda1 = std::min(big, small);
  out.lambda2 = std::max(big, small);
  out.v1 = eigenvector_for(m, out.lambda1);
  out.v2 = eigenvector_for(m, out.lambda2);
  return out;
}

}  // namespace rankone
