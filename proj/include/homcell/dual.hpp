#pragma once

#include <cmath>

namespace homcell {

// Forward-mode dual number carrying the gradient with respect to (x, y).
struct Dual {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double value, double gx, double gy) : v(value), dx(gx), dy(gy) {}

  static constexpr Dual var_x(double value) { return {value, 1.0, 0.0}; }
  static constexpr Dual var_y(double value) { return {value, 0.0, 1.0}; }
};

constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
constexpr Dual operator-(Dual a) { return {-a.v, -a.dx, -a.dy}; }
constexpr Dual operator*(Dual a, Dual b) {
  return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
}
constexpr Dual operator/(Dual a, Dual b) {
  const double q = a.v / b.v;
  return {q, (a.dx - q * b.dx) / b.v, (a.dy - q * b.dy) / b.v};
}

inline Dual sin(Dual a) {
  const double c = std::cos(a.v);
  return {std::sin(a.v), c * a.dx, c * a.dy};
}
inline Dual cos(Dual a) {
  const double s = -std::sin(a.v);
  return {std::cos(a.v), s * a.dx, s * a.dy};
}
inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.dx, e * a.dy};
}
inline Dual log(Dual a) { return {std::log(a.v), a.dx / a.v, a.dy / a.v}; }
inline Dual sqrt(Dual a) {
  const double r = std::sqrt(a.v);
  const double k = 0.5 / r;
  return {r, k * a.dx, k * a.dy};
}

inline double value_of(double a) { return a; }
inline double value_of(const Dual& a) { return a.v; }

// a^n for integer n (n may be negative).
template <class T>
T integer_power(T base, long n) {
  if (n < 0) return T(1.0) / integer_power(base, -n);
  T result(1.0);
  T b = base;
  while (n > 0) {
    if (n & 1) result = result * b;
    b = b * b;
    n >>= 1;
  }
  return result;
}

}  // namespace homcell
