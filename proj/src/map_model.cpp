#include "homcell/map_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "homcell/errors.hpp"

namespace homcell {

const char* map_kind_name(MapKind kind) {
  switch (kind) {
    case MapKind::kBuiltin: return "builtin";
    case MapKind::kExpression: return "expression";
    case MapKind::kOdeTimeT: return "ode_time_T";
  }
  return "?";
}

SmoothPlanarMap::SmoothPlanarMap(MapKind kind, std::string name, ParamTable params, MapEvaluators evaluators,
                                 Rect working_rect)
    : kind_(kind),
      name_(std::make_shared<const std::string>(std::move(name))),
      params_(std::make_shared<const ParamTable>(std::move(params))),
      rect_(working_rect) {
  if (!evaluators.forward) throw Error(ErrorCode::kInvalidArgument, "map needs a forward evaluator");
  if (!evaluators.forward_with_jacobian) {
    if (!evaluators.dual_jacobian) throw Error(ErrorCode::kInvalidArgument, "map needs a Jacobian evaluator");
    auto fwd = evaluators.forward;
    auto dj = evaluators.dual_jacobian;
    evaluators.forward_with_jacobian = [fwd, dj](Vec2 x, Mat2& jac) {
      jac = dj(x);
      return fwd(x);
    };
  }
  if (static_cast<bool>(evaluators.inverse) != static_cast<bool>(evaluators.inverse_with_jacobian))
    throw Error(ErrorCode::kInvalidArgument, "inverse needs both value and Jacobian evaluators");
  ev_ = std::make_shared<const MapEvaluators>(std::move(evaluators));
}

SmoothPlanarMap SmoothPlanarMap::with_working_rect(const Rect& rect) const {
  SmoothPlanarMap copy = *this;
  copy.rect_ = rect;
  return copy;
}

Mat2 SmoothPlanarMap::jacobian(Vec2 x) const {
  Mat2 j;
  ev_->forward_with_jacobian(x, j);
  return j;
}

Mat2 SmoothPlanarMap::dual_jacobian(Vec2 x) const {
  if (!ev_->dual_jacobian) return jacobian(x);
  return ev_->dual_jacobian(x);
}

namespace {

Vec2 newton_inverse(const MapEvaluators& ev, Vec2 y) {
  Vec2 x = y;
  Mat2 j;
  Vec2 r = ev.forward_with_jacobian(x, j) - y;
  const double tol = 1e-13 * std::max(1.0, norm(y));
  for (int it = 0; it < 60; ++it) {
    const double rn = norm(r);
    if (rn <= tol) return x;
    const auto ji = inverse(j);
    if (!ji) break;
    const Vec2 step = *ji * r;
    double s = 1.0;
    bool improved = false;
    for (int half = 0; half < 30; ++half, s *= 0.5) {
      const Vec2 cand = x - s * step;
      Mat2 jc;
      Vec2 rc;
      try {
        rc = ev.forward_with_jacobian(cand, jc) - y;
      } catch (const Error&) {
        continue;
      }
      if (norm(rc) < rn || (norm(rc) <= tol)) {
        x = cand;
        r = rc;
        j = jc;
        improved = true;
        break;
      }
    }
    if (!improved) {
      if (rn <= 1e3 * tol) return x;
      break;
    }
  }
  if (norm(r) <= tol) return x;
  std::ostringstream msg;
  msg << "Newton inversion failed at (" << y.x << ", " << y.y << "), residual " << norm(r);
  throw Error(ErrorCode::kNoInverse, msg.str());
}

}  // namespace

Vec2 SmoothPlanarMap::eval_inverse(Vec2 y) const {
  if (ev_->inverse) return ev_->inverse(y);
  return newton_inverse(*ev_, y);
}

Vec2 SmoothPlanarMap::eval_inverse_with_jacobian(Vec2 y, Mat2& jac) const {
  if (ev_->inverse_with_jacobian) return ev_->inverse_with_jacobian(y, jac);
  const Vec2 x = newton_inverse(*ev_, y);
  const auto ji = inverse(jacobian(x));
  if (!ji) throw Error(ErrorCode::kNoInverse, "singular Jacobian at preimage");
  jac = *ji;
  return x;
}

Vec2 SmoothPlanarMap::iterate(Vec2 x, int n) const {
  for (int i = 0; i < n; ++i) x = eval(x);
  for (int i = 0; i < -n; ++i) x = eval_inverse(x);
  return x;
}

Vec2 SmoothPlanarMap::iterate_with_jacobian(Vec2 x, int n, Mat2& jac) const {
  jac = Mat2::identity();
  Mat2 step;
  for (int i = 0; i < n; ++i) {
    x = eval_with_jacobian(x, step);
    jac = step * jac;
  }
  for (int i = 0; i < -n; ++i) {
    x = eval_inverse_with_jacobian(x, step);
    jac = step * jac;
  }
  return x;
}

SmoothPlanarMap SmoothPlanarMap::inverse_map() const {
  auto self = std::make_shared<const SmoothPlanarMap>(*this);
  MapEvaluators inv;
  inv.forward = [self](Vec2 y) { return self->eval_inverse(y); };
  inv.forward_with_jacobian = [self](Vec2 y, Mat2& j) { return self->eval_inverse_with_jacobian(y, j); };
  inv.inverse = [self](Vec2 x) { return self->eval(x); };
  inv.inverse_with_jacobian = [self](Vec2 x, Mat2& j) { return self->eval_with_jacobian(x, j); };
  return SmoothPlanarMap(kind_, name() + "^-1", params(), std::move(inv), rect_);
}

Mat2 finite_difference_jacobian(const SmoothPlanarMap& f, Vec2 x, double h) {
  const Vec2 dx = (f.eval({x.x + h, x.y}) - f.eval({x.x - h, x.y})) / (2 * h);
  const Vec2 dy = (f.eval({x.x, x.y + h}) - f.eval({x.x, x.y - h})) / (2 * h);
  return {dx.x, dy.x, dx.y, dy.y};
}

InvariantCheck check_map_invariants(const SmoothPlanarMap& f, int grid, std::optional<Rect> probe_rect) {
  const Rect r = probe_rect.value_or(f.working_rect());
  InvariantCheck out;
  out.min_det = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const Vec2 p{r.xmin + (i + 0.5) * r.width() / grid, r.ymin + (j + 0.5) * r.height() / grid};
      try {
        Mat2 jac;
        const Vec2 fp = f.eval_with_jacobian(p, jac);
        const double d = det(jac);
        out.min_det = std::min(out.min_det, d);
        if (!(d > 0.0)) {
          out.ok = false;
          detail << "det " << d << " at (" << p.x << ", " << p.y << "); ";
        }
        const Mat2 fd = finite_difference_jacobian(f, p);
        const double rel = max_abs(jac - fd) / std::max(1.0, max_abs(jac));
        out.max_jacobian_rel_error = std::max(out.max_jacobian_rel_error, rel);
        if (rel >= 1e-5) {
          out.ok = false;
          detail << "jacobian mismatch " << rel << " at (" << p.x << ", " << p.y << "); ";
        }
        if (f.has_explicit_inverse()) {
          const double e = distance(f.eval_inverse(fp), p);
          out.max_inverse_error = std::max(out.max_inverse_error, e);
          if (e >= 1e-9) {
            out.ok = false;
            detail << "inverse error " << e << " at (" << p.x << ", " << p.y << "); ";
          }
        }
      } catch (const Error&) {
        continue;
      }
    }
  }
  out.detail = detail.str();
  return out;
}

// --- expression and ODE maps -------------------------------------------------

namespace {

std::vector<std::string> param_names(const ParamTable& params) {
  std::vector<std::string> names;
  for (const auto& [k, v] : params) names.push_back(k);
  return names;
}

std::vector<double> param_values(const ParamTable& params) {
  std::vector<double> vals;
  for (const auto& [k, v] : params) vals.push_back(v);
  return vals;
}

struct ExprPair {
  ExpressionAst fx, fy;
  std::vector<double> values;

  Vec2 value(Vec2 p) const { return {fx.evaluate(p.x, p.y, values), fy.evaluate(p.x, p.y, values)}; }
  Vec2 value_jac(Vec2 p, Mat2& j) const {
    const Dual x = Dual::var_x(p.x), y = Dual::var_y(p.y);
    const Dual a = fx.evaluate(x, y, values), b = fy.evaluate(x, y, values);
    j = {a.dx, a.dy, b.dx, b.dy};
    return {a.v, b.v};
  }
};

}  // namespace

SmoothPlanarMap make_expression_map(const std::string& fx, const std::string& fy, const ParamTable& params,
                                    const std::string& name,
                                    const std::optional<std::pair<std::string, std::string>>& inverse,
                                    Rect working_rect) {
  const auto names = param_names(params);
  auto fwd = std::make_shared<const ExprPair>(
      ExprPair{parse_expression(fx, names), parse_expression(fy, names), param_values(params)});
  MapEvaluators ev;
  ev.forward = [fwd](Vec2 p) { return fwd->value(p); };
  ev.forward_with_jacobian = [fwd](Vec2 p, Mat2& j) { return fwd->value_jac(p, j); };
  ev.dual_jacobian = [fwd](Vec2 p) {
    Mat2 j;
    fwd->value_jac(p, j);
    return j;
  };
  if (inverse) {
    auto inv = std::make_shared<const ExprPair>(ExprPair{parse_expression(inverse->first, names),
                                                         parse_expression(inverse->second, names),
                                                         param_values(params)});
    ev.inverse = [inv](Vec2 p) { return inv->value(p); };
    ev.inverse_with_jacobian = [inv](Vec2 p, Mat2& j) { return inv->value_jac(p, j); };
  }
  return SmoothPlanarMap(MapKind::kExpression, name, params, std::move(ev), working_rect);
}

VectorField make_vector_field(const std::string& fx, const std::string& fy, const ParamTable& params) {
  const auto names = param_names(params);
  return VectorField{parse_expression(fx, names), parse_expression(fy, names), params};
}

SmoothPlanarMap make_time_T_map(PlanarField field, double T, MapKind kind, const std::string& name,
                                ParamTable params, const OdeSettings& settings, Rect working_rect) {
  if (T == 0.0 || !std::isfinite(T)) throw Error(ErrorCode::kInvalidArgument, "time-T map needs a finite T != 0");
  auto fld = std::make_shared<const PlanarField>(std::move(field));
  MapEvaluators ev;
  ev.forward = [fld, T, settings](Vec2 p) { return integrate_flow(*fld, p, T, settings); };
  ev.forward_with_jacobian = [fld, T, settings](Vec2 p, Mat2& j) { return integrate_flow(*fld, p, T, settings, &j); };
  ev.inverse = [fld, T, settings](Vec2 p) { return integrate_flow(*fld, p, -T, settings); };
  ev.inverse_with_jacobian = [fld, T, settings](Vec2 p, Mat2& j) { return integrate_flow(*fld, p, -T, settings, &j); };
  params["T"] = T;
  return SmoothPlanarMap(kind, name, std::move(params), std::move(ev), working_rect);
}

SmoothPlanarMap make_time_T_map(const VectorField& field, double T, const std::string& name,
                                const OdeSettings& settings, Rect working_rect) {
  auto comps = std::make_shared<const ExprPair>(ExprPair{field.fx, field.fy, param_values(field.params)});
  PlanarField pf;
  pf.value = [comps](Vec2 p) { return comps->value(p); };
  pf.jacobian = [comps](Vec2 p) {
    Mat2 j;
    comps->value_jac(p, j);
    return j;
  };
  return make_time_T_map(std::move(pf), T, MapKind::kOdeTimeT, name, field.params, settings, working_rect);
}

// --- built-in zoo ------------------------------------------------------------

namespace {

template <class F>
Vec2 eval_functor(const F& f, Vec2 p) {
  const auto r = f(p.x, p.y);
  return {r[0], r[1]};
}

template <class F>
Mat2 dual_functor_jacobian(const F& f, Vec2 p) {
  const auto r = f(Dual::var_x(p.x), Dual::var_y(p.y));
  return {r[0].dx, r[0].dy, r[1].dx, r[1].dy};
}

// Map given by a templated functor, an analytic Jacobian and (optionally) an explicit inverse.
template <class F, class J>
MapEvaluators functor_map(F f, J jac) {
  MapEvaluators ev;
  ev.forward = [f](Vec2 p) { return eval_functor(f, p); };
  ev.forward_with_jacobian = [f, jac](Vec2 p, Mat2& j) {
    j = jac(p);
    return eval_functor(f, p);
  };
  ev.dual_jacobian = [f](Vec2 p) { return dual_functor_jacobian(f, p); };
  return ev;
}

template <class F, class J>
void set_inverse(MapEvaluators& ev, F g, J jac) {
  ev.inverse = [g](Vec2 p) { return eval_functor(g, p); };
  ev.inverse_with_jacobian = [g, jac](Vec2 p, Mat2& j) {
    j = jac(p);
    return eval_functor(g, p);
  };
}

template <class F>
PlanarField functor_field(F f) {
  PlanarField pf;
  pf.value = [f](Vec2 p) { return eval_functor(f, p); };
  pf.jacobian = [f](Vec2 p) { return dual_functor_jacobian(f, p); };
  return pf;
}

struct LinearFn {
  double a11, a12, a21, a22;
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    return {a11 * x + a12 * y, a21 * x + a22 * y};
  }
};

MapEvaluators linear_evaluators(const Mat2& m) {
  MapEvaluators ev = functor_map(LinearFn{m.a11, m.a12, m.a21, m.a22}, [m](Vec2) { return m; });
  const Mat2 mi = *inverse(m);
  set_inverse(ev, LinearFn{mi.a11, mi.a12, mi.a21, mi.a22}, [mi](Vec2) { return mi; });
  return ev;
}

// (x, y) -> (a - x^2 - b y, x)
struct HenonFn {
  double a, b;
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    return {a - x * x - b * y, x};
  }
};
struct HenonInvFn {
  double a, b;
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    return {y, (a - y * y - x) / b};
  }
};

// (x, y) -> (1 - alpha x^2 + y, -x)
struct ApHenonFn {
  double alpha;
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    return {1.0 - alpha * x * x + y, -x};
  }
};
struct ApHenonInvFn {
  double alpha;
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    return {-y, x - 1.0 + alpha * y * y};
  }
};

struct DuffingField {
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    return {y, x - x * x * x};
  }
};

// Duffing with a damping term that vanishes on the separatrix H = 0 and makes the centres sinks.
struct DissipativeDuffingField {
  double gamma;
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    const T x2 = x * x;
    const T h = 0.5 * y * y - 0.5 * x2 + 0.25 * x2 * x2;
    return {y, x - x2 * x + gamma * y * h / (1.0 + h * h)};
  }
};

// Duffing inside |z| < 2, linear contraction -z outside |z| > 3, smootherstep blend in between.
struct SphereNorthField {
  template <class T>
  std::array<T, 2> operator()(const T& x, const T& y) const {
    const T r2 = x * x + y * y;
    const double rv = value_of(r2);
    const auto duff = DuffingField{}(x, y);
    if (rv <= 4.0) return duff;
    if (rv >= 9.0) return {-x, -y};
    const T s = (r2 - 4.0) / 5.0;
    const T w = s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
    const T c = 1.0 - w;
    return {c * duff[0] - w * x, c * duff[1] - w * y};
  }
};

// The same field pushed forward by w = 1/z (complex): G(w) = -w^2 F(1/w).
struct SphereSouthField {
  template <class T>
  std::array<T, 2> operator()(const T& u, const T& v) const {
    const T m2 = u * u + v * v;
    if (value_of(m2) <= 1.0 / 9.0) return {u, v};
    const auto f = SphereNorthField{}(u / m2, -v / m2);
    const T wr = u * u - v * v, wi = 2.0 * u * v;
    return {-(wr * f[0] - wi * f[1]), -(wr * f[1] + wi * f[0])};
  }
};

double get(const ParamTable& p, const char* key) { return p.at(key); }

void require(bool cond, const std::string& map, const std::string& what) {
  if (!cond) throw Error(ErrorCode::kOutOfRange, map + ": parameters violate " + what);
}

}  // namespace

const std::vector<ZooEntry>& builtin_zoo() {
  static const std::vector<ZooEntry> kZoo{
      {"linear_saddle", "T(x,y) = (lambda x, mu y), direct saddle at the origin",
       {{"lambda", std::nullopt, "0 < lambda < 1"}, {"mu", std::nullopt, "mu > 1"}}},
      {"twisted_linear_saddle", "T(x,y) = (lambda x, mu y), twisted saddle at the origin",
       {{"lambda", std::nullopt, "-1 < lambda < 0"}, {"mu", std::nullopt, "mu < -1"}}},
      {"linear", "(x,y) -> (a11 x + a12 y, a21 x + a22 y)",
       {{"a11", std::nullopt, ""}, {"a12", std::nullopt, ""}, {"a21", std::nullopt, ""},
        {"a22", std::nullopt, "a11 a22 - a12 a21 > 0"}}},
      {"henon", "(x,y) -> (a - x^2 - b y, x), Jacobian determinant b",
       {{"a", std::nullopt, ""}, {"b", std::nullopt, "b > 0"}}},
      {"area_preserving_henon", "(x,y) -> (1 - alpha x^2 + y, -x), Jacobian determinant 1",
       {{"alpha", std::nullopt, "alpha > 0"}}},
      {"duffing_time1", "time-T map of x' = y, y' = x - x^3", {{"T", 1.0, "T != 0"}}},
      {"dissipative_duffing_time1",
       "time-T map of x' = y, y' = x - x^3 + gamma y H / (1 + H^2), H = y^2/2 - x^2/2 + x^4/4",
       {{"gamma", 0.5, "gamma > 0"}, {"T", 1.0, "T != 0"}}},
      {"duffing_sphere_north", "north chart of a Duffing flow on the sphere with a source at infinity",
       {{"T", 1.0, "T != 0"}}},
      {"duffing_sphere_south", "south chart (w = 1/z) of duffing_sphere_north", {{"T", 1.0, "T != 0"}}},
  };
  return kZoo;
}

SmoothPlanarMap builtin_map(const std::string& name, const ParamTable& given, Rect working_rect) {
  const auto& zoo = builtin_zoo();
  const auto entry = std::find_if(zoo.begin(), zoo.end(), [&](const ZooEntry& e) { return e.name == name; });
  if (entry == zoo.end()) throw Error(ErrorCode::kInvalidArgument, "unknown built-in map '" + name + "'");
  ParamTable p;
  for (const auto& spec : entry->params) {
    const auto it = given.find(spec.name);
    if (it != given.end()) {
      if (!std::isfinite(it->second)) throw Error(ErrorCode::kOutOfRange, name + ": parameter '" + spec.name + "' is not finite");
      p[spec.name] = it->second;
    } else if (spec.default_value) {
      p[spec.name] = *spec.default_value;
    } else {
      throw Error(ErrorCode::kInvalidArgument, name + ": missing parameter '" + spec.name + "'");
    }
  }
  for (const auto& [k, v] : given) {
    if (!p.count(k)) throw Error(ErrorCode::kInvalidArgument, name + ": unknown parameter '" + k + "'");
  }

  if (name == "linear_saddle" || name == "twisted_linear_saddle") {
    const double l = get(p, "lambda"), m = get(p, "mu");
    if (name == "linear_saddle") require(m > 1.0 && 1.0 > l && l > 0.0, name, "mu > 1 > lambda > 0");
    else require(m < -1.0 && -1.0 < l && l < 0.0, name, "mu < -1 < lambda < 0");
    return SmoothPlanarMap(MapKind::kBuiltin, name, p, linear_evaluators({l, 0.0, 0.0, m}), working_rect);
  }
  if (name == "linear") {
    const Mat2 m{get(p, "a11"), get(p, "a12"), get(p, "a21"), get(p, "a22")};
    require(det(m) > 0.0, name, "det > 0");
    return SmoothPlanarMap(MapKind::kBuiltin, name, p, linear_evaluators(m), working_rect);
  }
  if (name == "henon") {
    const double a = get(p, "a"), b = get(p, "b");
    require(b > 0.0, name, "b > 0");
    MapEvaluators ev = functor_map(HenonFn{a, b}, [b](Vec2 q) { return Mat2{-2.0 * q.x, -b, 1.0, 0.0}; });
    set_inverse(ev, HenonInvFn{a, b}, [b](Vec2 q) { return Mat2{0.0, 1.0, -1.0 / b, -2.0 * q.y / b}; });
    return SmoothPlanarMap(MapKind::kBuiltin, name, p, std::move(ev), working_rect);
  }
  if (name == "area_preserving_henon") {
    const double al = get(p, "alpha");
    require(al > 0.0, name, "alpha > 0");
    MapEvaluators ev = functor_map(ApHenonFn{al}, [al](Vec2 q) { return Mat2{-2.0 * al * q.x, 1.0, -1.0, 0.0}; });
    set_inverse(ev, ApHenonInvFn{al}, [al](Vec2 q) { return Mat2{0.0, -1.0, 1.0, 2.0 * al * q.y}; });
    return SmoothPlanarMap(MapKind::kBuiltin, name, p, std::move(ev), working_rect);
  }

  const double T = get(p, "T");
  require(T != 0.0, name, "T != 0");
  ParamTable rest = p;
  rest.erase("T");
  if (name == "duffing_time1")
    return make_time_T_map(functor_field(DuffingField{}), T, MapKind::kBuiltin, name, rest, {}, working_rect);
  if (name == "dissipative_duffing_time1") {
    const double g = get(p, "gamma");
    require(g > 0.0, name, "gamma > 0");
    return make_time_T_map(functor_field(DissipativeDuffingField{g}), T, MapKind::kBuiltin, name, rest, {},
                           working_rect);
  }
  if (name == "duffing_sphere_north")
    return make_time_T_map(functor_field(SphereNorthField{}), T, MapKind::kBuiltin, name, rest, {}, working_rect);
  return make_time_T_map(functor_field(SphereSouthField{}), T, MapKind::kBuiltin, name, rest, {}, working_rect);
}

}  // namespace homcell
