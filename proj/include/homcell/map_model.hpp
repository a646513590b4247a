#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "homcell/expression.hpp"
#include "homcell/geometry.hpp"
#include "homcell/ode.hpp"

namespace homcell {

enum class MapKind { kBuiltin, kExpression, kOdeTimeT };

const char* map_kind_name(MapKind kind);

struct MapEvaluators {
  std::function<Vec2(Vec2)> forward;
  std::function<Vec2(Vec2, Mat2&)> forward_with_jacobian;
  // Optional explicit inverse; without it the map falls back to Newton inversion.
  std::function<Vec2(Vec2)> inverse;
  std::function<Vec2(Vec2, Mat2&)> inverse_with_jacobian;
  // Optional second Jacobian source (automatic differentiation) for cross-checks.
  std::function<Mat2(Vec2)> dual_jacobian;
};

// Orientation-preserving C^1 planar map. Immutable and safe to share between threads.
class SmoothPlanarMap {
 public:
  SmoothPlanarMap(MapKind kind, std::string name, ParamTable params, MapEvaluators evaluators,
                  Rect working_rect = {});

  MapKind kind() const { return kind_; }
  const std::string& name() const { return *name_; }
  const ParamTable& params() const { return *params_; }
  const Rect& working_rect() const { return rect_; }
  SmoothPlanarMap with_working_rect(const Rect& rect) const;

  Vec2 eval(Vec2 x) const { return ev_->forward(x); }
  Vec2 eval_with_jacobian(Vec2 x, Mat2& jac) const { return ev_->forward_with_jacobian(x, jac); }
  Mat2 jacobian(Vec2 x) const;

  bool has_explicit_inverse() const { return static_cast<bool>(ev_->inverse); }
  bool has_dual_jacobian() const { return static_cast<bool>(ev_->dual_jacobian); }
  Mat2 dual_jacobian(Vec2 x) const;

  // f^{-1}(y); uses the explicit inverse when present, otherwise damped Newton on f(x) = y.
  // Throws Error(kNoInverse) when Newton does not converge.
  Vec2 eval_inverse(Vec2 y) const;
  Vec2 eval_inverse_with_jacobian(Vec2 y, Mat2& jac) const;

  // f^n for any integer n (negative n iterates the inverse).
  Vec2 iterate(Vec2 x, int n) const;
  Vec2 iterate_with_jacobian(Vec2 x, int n, Mat2& jac) const;

  // The map f^{-1} with f as its inverse.
  SmoothPlanarMap inverse_map() const;

 private:
  MapKind kind_;
  std::shared_ptr<const std::string> name_;
  std::shared_ptr<const ParamTable> params_;
  std::shared_ptr<const MapEvaluators> ev_;
  Rect rect_;
};

// Central-difference Jacobian with step h.
Mat2 finite_difference_jacobian(const SmoothPlanarMap& f, Vec2 x, double h = 1e-6);

struct InvariantCheck {
  bool ok = true;
  double min_det = 0.0;
  double max_inverse_error = 0.0;
  double max_jacobian_rel_error = 0.0;
  std::string detail;
};

// Probes a grid over the working rectangle (or `probe_rect`) for det > 0, inverse consistency
// and Jacobian / finite-difference agreement. Probe points where evaluation throws are skipped.
InvariantCheck check_map_invariants(const SmoothPlanarMap& f, int grid = 10,
                                    std::optional<Rect> probe_rect = std::nullopt);

// --- expression and ODE maps -------------------------------------------------

struct VectorField {
  ExpressionAst fx;
  ExpressionAst fy;
  ParamTable params;
};

// Parses both components with the keys of `params` as the declared parameters.
SmoothPlanarMap make_expression_map(const std::string& fx, const std::string& fy, const ParamTable& params,
                                    const std::string& name = "expression",
                                    const std::optional<std::pair<std::string, std::string>>& inverse = std::nullopt,
                                    Rect working_rect = {});

VectorField make_vector_field(const std::string& fx, const std::string& fy, const ParamTable& params);

// Time-T map of the field, with the time-(-T) map as inverse.
SmoothPlanarMap make_time_T_map(const VectorField& field, double T, const std::string& name = "ode",
                                const OdeSettings& settings = {}, Rect working_rect = {});
SmoothPlanarMap make_time_T_map(PlanarField field, double T, MapKind kind, const std::string& name,
                                ParamTable params, const OdeSettings& settings = {}, Rect working_rect = {});

// --- built-in zoo ------------------------------------------------------------

struct ZooParam {
  std::string name;
  std::optional<double> default_value;
  std::string constraint;
};

struct ZooEntry {
  std::string name;
  std::string description;
  std::vector<ZooParam> params;
};

const std::vector<ZooEntry>& builtin_zoo();

// Throws Error(kInvalidArgument) for unknown names, missing or unknown parameters,
// and Error(kOutOfRange) for parameters violating the entry's constraint.
SmoothPlanarMap builtin_map(const std::string& name, const ParamTable& params = {}, Rect working_rect = {});

}  // namespace homcell
