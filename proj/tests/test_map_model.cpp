#include <chrono>

#include "doctest.h"
#include "fixtures.hpp"
#include "homcell/ode.hpp"

using namespace homcell;

namespace {

ParamTable zoo_params(const std::string& name) {
  if (name == "linear_saddle") return {{"lambda", 0.5}, {"mu", 2.0}};
  if (name == "twisted_linear_saddle") return {{"lambda", -0.5}, {"mu", -2.0}};
  if (name == "linear") return {{"a11", 1.2}, {"a12", 0.3}, {"a21", -0.4}, {"a22", 0.9}};
  if (name == "henon") return {{"a", 1.4}, {"b", 0.3}};
  if (name == "area_preserving_henon") return {{"alpha", 10.0}};
  return {};
}

double rel_error(const Mat2& a, const Mat2& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

}  // namespace

TEST_CASE("every zoo map: Jacobian sources agree with finite differences") {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& entry : builtin_zoo()) {
    const SmoothPlanarMap f = builtin_map(entry.name, zoo_params(entry.name));
    for (Vec2 x : {Vec2{0.3, -0.2}, Vec2{-0.8, 0.5}, Vec2{1.1, 0.7}}) {
      INFO(entry.name);
      const Mat2 fd = finite_difference_jacobian(f, x);
      CHECK(rel_error(f.jacobian(x), fd) < 1e-5);
      if (f.has_dual_jacobian()) CHECK(rel_error(f.dual_jacobian(x), fd) < 1e-5);
    }
  }
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 10.0);
}

TEST_CASE("zoo maps pass the invariant probes") {
  for (const auto& entry : builtin_zoo()) {
    INFO(entry.name);
    const SmoothPlanarMap f = builtin_map(entry.name, zoo_params(entry.name));
    const bool ode = f.kind() == MapKind::kOdeTimeT;
    const auto check = check_map_invariants(f, ode ? 4 : 10, Rect{-1.5, 1.5, -1.5, 1.5});
    CHECK_MESSAGE(check.ok, check.detail);
    CHECK(check.min_det > 0);
    CHECK(check.max_inverse_error < 1e-9);
  }
}

TEST_CASE("zoo parameter validation") {
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kConfig;
  };
  CHECK(code_of([] { builtin_map("no_such_map"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { builtin_map("linear_saddle", {{"lambda", 0.5}}); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { builtin_map("linear_saddle", {{"lambda", 1.5}, {"mu", 2}}); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([] { builtin_map("henon", {{"a", 1.4}, {"b", -0.3}}); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([] { builtin_map("area_preserving_henon", {{"alpha", 1}, {"zeta", 2}}); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("expression map with and without an explicit inverse") {
  const auto f = make_expression_map("x + a*y", "y", {{"a", 0.5}});
  CHECK_FALSE(f.has_explicit_inverse());
  const Vec2 y = f.eval({1, 2});
  CHECK(y.x == doctest::Approx(2.0));
  const Vec2 back = f.eval_inverse(y);
  CHECK(back.x == doctest::Approx(1.0));
  CHECK(back.y == doctest::Approx(2.0));
  const auto g = make_expression_map("x + a*y", "y", {{"a", 0.5}}, "shear", std::make_pair("x - a*y", "y"));
  CHECK(g.has_explicit_inverse());
  CHECK(g.iterate(g.iterate({0.3, 0.4}, 5), -5).x == doctest::Approx(0.3));
}

TEST_CASE("time-T map of the harmonic oscillator is a rotation") {
  const auto f = make_time_T_map(make_vector_field("y", "-x", {}), 1.0);
  Mat2 J;
  const Vec2 p = f.eval_with_jacobian({1.0, 0.0}, J);
  CHECK(std::abs(p.x - std::cos(1.0)) < 1e-11);
  CHECK(std::abs(p.y + std::sin(1.0)) < 1e-11);
  CHECK(std::abs(J.a11 - std::cos(1.0)) < 1e-10);
  CHECK(std::abs(J.a12 - std::sin(1.0)) < 1e-10);
  CHECK(std::abs(det(J) - 1.0) < 1e-10);
}

TEST_CASE("duffing time-1 map conserves energy") {
  const auto f = builtin_map("duffing_time1");
  for (Vec2 p : {Vec2{0.5, 0.1}, Vec2{1.2, -0.3}, Vec2{-0.9, 0.6}}) {
    CHECK(std::abs(fixtures::duffing_energy(f.eval(p)) - fixtures::duffing_energy(p)) < 1e-11);
  }
}

TEST_CASE("sphere charts of the duffing field are related by inversion") {
  const auto n = builtin_map("duffing_sphere_north");
  const auto s = builtin_map("duffing_sphere_south");
  for (Vec2 z : {Vec2{2.5, 0.3}, Vec2{-3.0, 1.0}, Vec2{0.5, 5.0}}) {
    const Vec2 a = n.eval(z);
    const Vec2 w = Vec2{z.x, -z.y} / dot(z, z);
    const Vec2 b = s.eval(w);
    const Vec2 back = Vec2{b.x, -b.y} / dot(b, b);
    CHECK(distance(a, back) < 1e-9 * std::max(1.0, norm(a)));
  }
}
