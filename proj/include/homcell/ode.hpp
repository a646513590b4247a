#pragma once

#include <functional>

#include "homcell/geometry.hpp"

namespace homcell {

struct OdeSettings {
  double atol = 1e-12;
  double rtol = 1e-12;
  double initial_step = 0.02;
  double min_step = 1e-13;
  long max_steps = 2'000'000;
};

// Autonomous planar field with its Jacobian.
struct PlanarField {
  std::function<Vec2(Vec2)> value;
  std::function<Mat2(Vec2)> jacobian;
};

// Dormand-Prince 5(4) flow of `field` for signed time T. When `jacobian_out` is non-null the
// variational equation dJ/dt = DF(x) J is carried along and included in the error control.
// Throws Error(kIntegrationFailure) on step underflow or step-count overflow.
Vec2 integrate_flow(const PlanarField& field, Vec2 x0, double T, const OdeSettings& settings,
                    Mat2* jacobian_out = nullptr);

}  // namespace homcell
