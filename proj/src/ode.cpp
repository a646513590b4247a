#include "homcell/ode.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "homcell/errors.hpp"

namespace homcell {
namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
  Vec2 x;
  Mat2 j;
};

State operator+(const State& a, const State& b) { return {a.x + b.x, {a.j.a11 + b.j.a11, a.j.a12 + b.j.a12, a.j.a21 + b.j.a21, a.j.a22 + b.j.a22}}; }
State operator*(double s, const State& a) { return {s * a.x, {s * a.j.a11, s * a.j.a12, s * a.j.a21, s * a.j.a22}}; }

}  // namespace

Vec2 integrate_flow(const PlanarField& field, Vec2 x0, double T, const OdeSettings& settings, Mat2* jacobian_out) {
  const bool with_j = jacobian_out != nullptr;
  auto rhs = [&](const State& s) {
    State d;
    d.x = field.value(s.x);
    if (with_j) d.j = field.jacobian(s.x) * s.j;
    return d;
  };

  State y{x0, Mat2::identity()};
  if (T == 0.0) {
    if (with_j) *jacobian_out = y.j;
    return x0;
  }
  const double dir = T > 0 ? 1.0 : -1.0;
  const double span = std::abs(T);
  double t = 0.0;
  double h = std::min(settings.initial_step, span);
  State k1 = rhs(y);
  long steps = 0;
  bool last_rejected = false;

  while (t < span) {
    if (++steps > settings.max_steps) {
      throw Error(ErrorCode::kIntegrationFailure, "too many integration steps");
    }
    bool final_step = false;
    if (t + h >= span) {
      h = span - t;
      final_step = true;
    }
    const double hs = dir * h;
    const State k2 = rhs(y + (hs * a21) * k1);
    const State k3 = rhs(y + hs * (a31 * k1 + a32 * k2));
    const State k4 = rhs(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = rhs(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = rhs(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(ynew);
    const State err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double sum = 0.0;
    int comps = 0;
    auto accumulate = [&](double e, double a, double b) {
      const double sc = settings.atol + settings.rtol * std::max(std::abs(a), std::abs(b));
      sum += (e / sc) * (e / sc);
      ++comps;
    };
    accumulate(err.x.x, y.x.x, ynew.x.x);
    accumulate(err.x.y, y.x.y, ynew.x.y);
    if (with_j) {
      accumulate(err.j.a11, y.j.a11, ynew.j.a11);
      accumulate(err.j.a12, y.j.a12, ynew.j.a12);
      accumulate(err.j.a21, y.j.a21, ynew.j.a21);
      accumulate(err.j.a22, y.j.a22, ynew.j.a22);
    }
    const double en = std::sqrt(sum / comps);
    if (!std::isfinite(en) || !std::isfinite(ynew.x.x) || !std::isfinite(ynew.x.y)) {
      h *= 0.25;
      last_rejected = true;
      if (h < settings.min_step) throw Error(ErrorCode::kIntegrationFailure, "non-finite state during integration");
      continue;
    }

    if (en <= 1.0) {
      t = final_step ? span : t + h;
      y = ynew;
      k1 = k7;
      double fac = en == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      last_rejected = false;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      if (h < settings.min_step) {
        std::ostringstream msg;
        msg << "step size underflow at t=" << dir * t << " from (" << x0.x << ", " << x0.y << ")";
        throw Error(ErrorCode::kIntegrationFailure, msg.str());
      }
    }
  }
  if (with_j) *jacobian_out = y.j;
  return y.x;
}

}  // namespace homcell
