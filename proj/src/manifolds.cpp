#include "homcell/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "homcell/errors.hpp"
#include "homcell/parallel.hpp"

namespace homcell {

const char* branch_kind_name(BranchKind k) { return k == BranchKind::kStable ? "stable" : "unstable"; }
const char* branch_side_name(BranchSide s) { return s == BranchSide::kPlus ? "plus" : "minus"; }

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kSeeded: return "seeded";
    case StopReason::kTargetReached: return "target_reached";
    case StopReason::kReturnedToSaddle: return "returned_to_saddle";
    case StopReason::kRefinementExhausted: return "refinement_exhausted";
    case StopReason::kLeftWorkingRectangle: return "left_working_rectangle";
    case StopReason::kStalled: return "stalled";
  }
  return "?";
}

namespace {

Vec2 seed_point(const ManifoldBranch& b, double s) {
  if (s <= 0.0) return b.q;
  if (s >= 1.0) return b.gq;
  const double m = b.expansion;
  const double w = std::abs(m - 1.0) < 1e-12 ? s : (std::pow(m, s) - 1.0) / (m - 1.0);
  return b.q + w * (b.gq - b.q);
}

double turn_at(const std::vector<Vec2>& x, std::size_t i) {
  const Vec2 a = x[i] - x[i - 1], b = x[i + 1] - x[i];
  if (norm(a) == 0.0 || norm(b) == 0.0) return 0.0;
  return std::abs(turn_angle(a, b));
}

}  // namespace

ManifoldBranch seed_branch(const SmoothPlanarMap& f, const FixedPointRecord& saddle, BranchKind kind,
                           BranchSide side, double delta) {
  if (!(delta >= 1e-8 && delta <= 1e-3)) throw Error(ErrorCode::kInvalidArgument, "seed distance must lie in [1e-8, 1e-3]");
  const int period = std::max(1, saddle.minimal_period);
  Mat2 jac;
  f.iterate_with_jacobian(saddle.location, period, jac);
  const auto eig = eigenvalues(jac);
  const Classification c = classify_eigenvalues(eig);
  if (c.cls != FixedPointClass::kDirectSaddle && c.cls != FixedPointClass::kTwistedSaddle) {
    throw Error(ErrorCode::kNotASaddle, std::string("fixed point is ") + class_name(c.cls) + ", not a direct or twisted saddle");
  }
  ManifoldBranch b{f, saddle.location};
  b.saddle_period = period;
  b.kind = kind;
  b.side = side;
  b.twisted = c.cls == FixedPointClass::kTwistedSaddle;
  b.power = b.twisted ? 2 * period : period;
  const double mu = eig[0].real(), lambda = eig[1].real();
  b.eigenvalue = kind == BranchKind::kUnstable ? mu : lambda;
  b.eigenvector = eigenvector(jac, b.eigenvalue);
  b.direction = side == BranchSide::kPlus ? b.eigenvector : -b.eigenvector;
  const double m = kind == BranchKind::kUnstable ? std::abs(mu) : 1.0 / std::abs(lambda);
  b.expansion = b.twisted ? m * m : m;
  b.delta = delta;
  b.q = saddle.location + delta * b.direction;
  b.gq = f.iterate(b.q, b.g_steps());

  b.polyline.push_back(saddle.location);
  b.params.push_back(0.0);
  for (int j = 0; j <= 16; ++j) {
    const double s = j / 16.0;
    b.polyline.push_back(seed_point(b, s));
    b.params.push_back(1.0 + s);
  }
  b.arclength = polyline_length(b.polyline);
  b.stop_reason = StopReason::kSeeded;
  return b;
}

Vec2 exact_point(const ManifoldBranch& b, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::kOutOfRange, "branch parameter must be >= 0");
  if (t <= 1.0) return b.saddle + t * (b.q - b.saddle);
  const double tau = t - 1.0;
  const double k = std::floor(tau);
  Vec2 x = seed_point(b, tau - k);
  const int steps = b.g_steps();
  for (long i = 0; i < static_cast<long>(k); ++i) x = b.map.iterate(x, steps);
  return x;
}

ManifoldBranch grow_branch(ManifoldBranch b, const GrowthOptions& o) {
  std::vector<Vec2> X;
  std::vector<double> T;
  X.push_back(b.saddle);
  T.push_back(0.0);
  for (int j = 0; j <= 16; ++j) {
    X.push_back(seed_point(b, j / 16.0));
    T.push_back(1.0 + j / 16.0);
  }
  const Rect rect = b.map.working_rect();
  const int steps = b.g_steps();
  StopReason reason = StopReason::kStalled;
  double far = 0.0;
  std::size_t dom_begin = 1;  // index of the vertex at t = 1 + k
  double length_before = distance(X[0], X[1]);

  // Exact evaluation that reports failure instead of throwing.
  auto eval_exact = [&](double t, Vec2& out) {
    try {
      out = exact_point(b, t);
      return std::isfinite(out.x) && std::isfinite(out.y);
    } catch (const Error&) {
      return false;
    }
  };

  for (int k = 0;; ++k) {
    // Refine the current domain [dom_begin, end).
    bool exhausted = false;
    for (int pass = 0; pass < 64; ++pass) {
      std::vector<double> inserts;
      const std::size_t end = X.size();
      for (std::size_t i = dom_begin; i + 1 < end; ++i) {
        const double len = distance(X[i], X[i + 1]);
        const double dt = T[i + 1] - T[i];
        bool need = len > o.h_max || dt > o.max_param_step;
        if (!need && i >= 1 && turn_at(X, i) > o.alpha_max) need = true;
        if (!need && i + 2 < end && turn_at(X, i + 1) > o.alpha_max) need = true;
        if (!need) continue;
        if (len < o.h_min || dt < 1e-12) {
          // Turn violations on segments that cannot be split further are tolerated only when
          // they come from round-off on sub-h_min segments.
          if (len > o.h_max || dt > o.max_param_step) exhausted = true;
          continue;
        }
        inserts.push_back(0.5 * (T[i] + T[i + 1]));
      }
      if (inserts.empty()) break;
      std::vector<Vec2> pts(inserts.size());
      std::vector<char> ok(inserts.size(), 0);
      parallel_for(inserts.size(), [&](std::size_t j) { ok[j] = eval_exact(inserts[j], pts[j]); });
      if (std::find(ok.begin(), ok.end(), 0) != ok.end()) {
        exhausted = true;
        break;
      }
      std::vector<Vec2> nx(X.begin(), X.begin() + dom_begin);
      std::vector<double> nt(T.begin(), T.begin() + dom_begin);
      std::size_t j = 0;
      for (std::size_t i = dom_begin; i < end; ++i) {
        nx.push_back(X[i]);
        nt.push_back(T[i]);
        while (j < inserts.size() && i + 1 < end && inserts[j] > T[i] && inserts[j] < T[i + 1]) {
          nx.push_back(pts[j]);
          nt.push_back(inserts[j]);
          ++j;
        }
      }
      X.swap(nx);
      T.swap(nt);
      if (X.size() > o.max_vertices) break;
    }

    // Stop checks over the domain's vertices.
    bool stop = false;
    double length = length_before;
    for (std::size_t i = std::max<std::size_t>(dom_begin, 1); i < X.size(); ++i) {
      if (!rect.contains(X[i])) {
        X.resize(i);
        T.resize(i);
        reason = StopReason::kLeftWorkingRectangle;
        stop = true;
        break;
      }
      if (i > dom_begin) length += distance(X[i - 1], X[i]);
      far = std::max(far, distance(X[i], b.saddle));
      if (length >= o.target_arclength) {
        X.resize(i + 1);
        T.resize(i + 1);
        reason = StopReason::kTargetReached;
        stop = true;
        break;
      }
    }
    if (stop) break;
    if (exhausted) {
      reason = StopReason::kRefinementExhausted;
      break;
    }
    length_before = length;
    if (far > 1000 * b.delta && distance(X.back(), b.saddle) < 10 * b.delta) {
      reason = StopReason::kReturnedToSaddle;
      break;
    }
    if (k + 1 >= o.max_domains || X.size() > o.max_vertices) {
      reason = StopReason::kStalled;
      break;
    }

    // Next domain: image of the current one (its first vertex is the current last vertex).
    const std::size_t end = X.size();
    const std::size_t first = dom_begin + 1;
    const std::size_t count = end - first;
    std::vector<Vec2> img(count);
    std::vector<char> ok(count, 0);
    parallel_for(count, [&](std::size_t j) {
      try {
        img[j] = b.map.iterate(X[first + j], steps);
        ok[j] = std::isfinite(img[j].x) && std::isfinite(img[j].y);
      } catch (const Error&) {
        ok[j] = 0;
      }
    });
    std::size_t good = 0;
    while (good < count && ok[good]) ++good;
    // Contracting stretches inherit far more vertices than they need; drop a vertex when the
    // chord that replaces it stays short, parameter-dense and within round-off of the curve.
    std::size_t last = end - 1;
    for (std::size_t j = 0; j < good; ++j) {
      const bool can_drop = j + 1 < good;
      if (can_drop) {
        const Vec2 a = X[last];
        const Vec2 c = img[j + 1];
        const double tc = T[first + j + 1] + 1.0;
        double param = 0.0;
        if (distance(a, c) <= 0.5 * o.h_max && tc - T[last] <= o.max_param_step &&
            distance_to_segment(img[j], a, c, &param) <= 1e-4 * std::min(o.h_max, distance(a, c)) + 1e-15) {
          continue;
        }
      }
      X.push_back(img[j]);
      T.push_back(T[first + j] + 1.0);
      last = X.size() - 1;
    }
    dom_begin = end - 1;
    if (good < count) {
      reason = StopReason::kLeftWorkingRectangle;
      break;
    }
  }

  b.polyline = std::move(X);
  b.params = std::move(T);
  b.arclength = polyline_length(b.polyline);
  b.stop_reason = reason;
  return b;
}

Vec2 zeta(const ManifoldBranch& b, double t) {
  if (b.params.empty() || !(t >= 0.0) || t > b.params.back())
    throw Error(ErrorCode::kOutOfRange, "parameter outside the grown range of the branch");
  if (t == 0.0) return b.saddle;
  const auto it = std::lower_bound(b.params.begin(), b.params.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - b.params.begin());
  if (*it == t) return b.polyline[i];
  const double w = (t - b.params[i - 1]) / (b.params[i] - b.params[i - 1]);
  return b.polyline[i - 1] + w * (b.polyline[i] - b.polyline[i - 1]);
}

double max_turn_angle(const ManifoldBranch& b) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < b.polyline.size(); ++i) m = std::max(m, turn_at(b.polyline, i));
  return m;
}

}  // namespace homcell
