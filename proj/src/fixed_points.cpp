#include "homcell/fixed_points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "homcell/errors.hpp"
#include "homcell/parallel.hpp"

namespace homcell {

const char* class_name(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::kDirectSaddle: return "direct_saddle";
    case FixedPointClass::kTwistedSaddle: return "twisted_saddle";
    case FixedPointClass::kSink: return "sink";
    case FixedPointClass::kSource: return "source";
    case FixedPointClass::kElliptic: return "elliptic";
    case FixedPointClass::kNonsimple: return "nonsimple";
    case FixedPointClass::kReflectingSaddle: return "reflecting_saddle";
  }
  return "?";
}

Classification classify_eigenvalues(const std::array<std::complex<double>, 2>& eig) {
  constexpr double kTol = 1e-9;
  Classification out;
  bool real = true;
  for (const auto& e : eig) {
    if (std::abs(e.imag()) >= kTol) real = false;
  }
  for (const auto& e : eig) {
    if (std::abs(e - 1.0) < kTol) {
      out.cls = FixedPointClass::kNonsimple;
      out.borderline = true;
      return out;
    }
  }
  const double m0 = std::abs(eig[0]), m1 = std::abs(eig[1]);
  if (std::abs(m0 - 1.0) < kTol || std::abs(m1 - 1.0) < kTol) {
    out.cls = FixedPointClass::kElliptic;
    out.borderline = true;
    return out;
  }
  if (m0 > 1.0 && m1 > 1.0) {
    out.cls = FixedPointClass::kSource;
  } else if (m0 < 1.0 && m1 < 1.0) {
    out.cls = FixedPointClass::kSink;
  } else if (real) {
    const double a = eig[0].real(), b = eig[1].real();
    if (a > 0 && b > 0) out.cls = FixedPointClass::kDirectSaddle;
    else if (a < 0 && b < 0) out.cls = FixedPointClass::kTwistedSaddle;
    else out.cls = FixedPointClass::kReflectingSaddle;
  } else {
    // A complex pair has equal moduli, so this branch is unreachable for real matrices.
    out.cls = FixedPointClass::kElliptic;
    out.borderline = true;
  }
  return out;
}

bool is_hyperbolic(FixedPointClass c) {
  return c != FixedPointClass::kElliptic && c != FixedPointClass::kNonsimple;
}

bool is_saddle(FixedPointClass c) {
  return c == FixedPointClass::kDirectSaddle || c == FixedPointClass::kTwistedSaddle ||
         c == FixedPointClass::kReflectingSaddle;
}

NewtonResult newton_refine(const SmoothPlanarMap& f, int n, Vec2 seed, const NewtonOptions& options) {
  NewtonResult res;
  res.point = seed;
  const Rect& box = f.working_rect();
  auto residual_at = [&](Vec2 x, Mat2* jac) {
    Mat2 j;
    const Vec2 fx = jac ? f.iterate_with_jacobian(x, n, j) : f.iterate(x, n);
    if (jac) *jac = j - Mat2::identity();
    return fx - x;
  };
  Vec2 x = seed;
  Mat2 jm;
  Vec2 r;
  try {
    r = residual_at(x, &jm);
  } catch (const Error& e) {
    res.failure = e.what();
    return res;
  }
  double rn = norm(r);
  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it;
    if (rn <= options.tolerance) break;
    const double scale = std::max(1e-300, max_abs(jm) * max_abs(jm));
    if (std::abs(det(jm)) <= 1e-14 * scale) {
      res.failure = "singular Jacobian of f^n - id";
      break;
    }
    const Vec2 step = *inverse(jm) * r;
    double s = 1.0;
    bool improved = false;
    for (int half = 0; half < 25; ++half, s *= 0.5) {
      const Vec2 cand = x - s * step;
      if (!box.contains(cand)) continue;
      try {
        Mat2 jc;
        const Vec2 rc = residual_at(cand, &jc);
        const double rcn = norm(rc);
        if (rcn < rn) {
          x = cand;
          r = rc;
          rn = rcn;
          jm = jc;
          improved = true;
          break;
        }
      } catch (const Error&) {
        continue;
      }
    }
    if (!improved) {
      if (res.failure.empty()) res.failure = "no descent step (diverged or stalled)";
      break;
    }
  }
  res.point = x;
  res.residual = rn;
  if (!box.contains(x)) {
    res.failure = "left the working rectangle";
    return res;
  }
  if (rn <= options.tolerance || rn <= options.stall_tolerance) {
    res.converged = true;
    res.failure.clear();
  } else if (res.failure.empty()) {
    res.failure = "iteration limit reached";
  }
  return res;
}

namespace {

// Dense Gaussian elimination with partial pivoting; a is row-major m x m. False when singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t m) {
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
    if (std::abs(a[piv * m + c]) < 1e-300) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < m; ++k) std::swap(a[c * m + k], a[piv * m + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < m; ++r) {
      const double w = a[r * m + c] / a[c * m + c];
      if (w == 0.0) continue;
      for (std::size_t k = c; k < m; ++k) a[r * m + k] -= w * a[c * m + k];
      b[r] -= w * b[c];
    }
  }
  for (std::size_t c = m; c-- > 0;) {
    double v = b[c];
    for (std::size_t k = c + 1; k < m; ++k) v -= a[c * m + k] * b[k];
    b[c] = v / a[c * m + c];
  }
  return true;
}

}  // namespace

NewtonResult multiple_shooting_refine(const SmoothPlanarMap& f, int n, Vec2 seed, const NewtonOptions& options) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "period must be >= 1");
  if (n == 1) return newton_refine(f, 1, seed, options);
  NewtonResult res;
  res.point = seed;
  const Rect& box = f.working_rect();
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<Vec2> X(N), FX(N);
  std::vector<Mat2> J(N);
  X[0] = seed;
  try {
    for (std::size_t i = 1; i < N; ++i) X[i] = f.eval(X[i - 1]);
  } catch (const Error& e) {
    res.failure = e.what();
    return res;
  }
  // Residual max_i |f(x_i) - x_{i+1}|; false when an evaluation fails or leaves the rectangle.
  auto evaluate = [&](const std::vector<Vec2>& x, std::vector<Vec2>& fx, std::vector<Mat2>* jac, double& rn) {
    rn = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!box.contains(x[i])) return false;
      try {
        fx[i] = jac ? f.eval_with_jacobian(x[i], (*jac)[i]) : f.eval(x[i]);
      } catch (const Error&) {
        return false;
      }
      const double d = distance(fx[i], x[(i + 1) % N]);
      if (!std::isfinite(d)) return false;
      rn = std::max(rn, d);
    }
    return true;
  };
  double rn = 0.0;
  if (!evaluate(X, FX, &J, rn)) {
    res.failure = "seed orbit cannot be evaluated";
    return res;
  }
  const std::size_t m = 2 * N;
  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it;
    if (rn <= options.tolerance) break;
    std::vector<double> a(m * m, 0.0), b(m, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t r = 2 * i, c = 2 * i, cn = 2 * ((i + 1) % N);
      a[r * m + c] += J[i].a11;
      a[r * m + c + 1] += J[i].a12;
      a[(r + 1) * m + c] += J[i].a21;
      a[(r + 1) * m + c + 1] += J[i].a22;
      a[r * m + cn] -= 1.0;
      a[(r + 1) * m + cn + 1] -= 1.0;
      const Vec2 g = FX[i] - X[(i + 1) % N];
      b[r] = -g.x;
      b[r + 1] = -g.y;
    }
    if (!solve_dense(a, b, m)) {
      res.failure = "singular shooting Jacobian";
      break;
    }
    double s = 1.0;
    bool improved = false;
    for (int half = 0; half < 25; ++half, s *= 0.5) {
      std::vector<Vec2> cand(N), fc(N);
      std::vector<Mat2> jc(N);
      for (std::size_t i = 0; i < N; ++i) cand[i] = X[i] + s * Vec2{b[2 * i], b[2 * i + 1]};
      double rc = 0.0;
      if (!evaluate(cand, fc, &jc, rc) || !(rc < rn)) continue;
      X.swap(cand);
      FX.swap(fc);
      J.swap(jc);
      rn = rc;
      improved = true;
      break;
    }
    if (!improved) {
      res.failure = "no descent step (diverged or stalled)";
      break;
    }
  }
  res.point = X[0];
  res.residual = rn;
  if (rn <= options.tolerance || rn <= options.stall_tolerance) {
    res.converged = true;
    res.failure.clear();
  } else if (res.failure.empty()) {
    res.failure = "iteration limit reached";
  }
  return res;
}

FixedPointRecord make_record(const SmoothPlanarMap& f, int n, Vec2 x) {
  FixedPointRecord rec;
  rec.location = x;
  rec.period = n;
  Mat2 jac;
  rec.residual = distance(f.iterate_with_jacobian(x, n, jac), x);
  const double residual = rec.residual;
  rec.eigenvalues = eigenvalues(jac);
  const Classification c = classify_eigenvalues(rec.eigenvalues);
  rec.cls = c.cls;
  rec.borderline = c.borderline;
  rec.minimal_period = n;
  Vec2 y = x;
  for (int m = 1; m <= n; ++m) {
    y = f.eval(y);
    if (n % m == 0 && distance(y, x) < std::max(1e-8, 100 * residual)) {
      rec.minimal_period = m;
      break;
    }
  }
  rec.orbit.push_back(x);
  y = x;
  for (int m = 1; m < rec.minimal_period; ++m) {
    y = f.eval(y);
    rec.orbit.push_back(y);
  }
  return rec;
}

namespace {

struct Found {
  Vec2 x;
  double residual;
};

std::vector<Found> sweep(const SmoothPlanarMap& f, int n, const Rect& region, int grid,
                         const FixedPointSearchOptions& options, SearchDiagnostics* diag,
                         const std::function<bool(Vec2)>& mask) {
  if (grid < 2) throw Error(ErrorCode::kInvalidArgument, "grid must be >= 2");
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "period must be >= 1");
  const int g = grid;
  const double dx = region.width() / (g - 1), dy = region.height() / (g - 1);
  auto node = [&](int i, int j) { return Vec2{region.xmin + i * dx, region.ymin + j * dy}; };

  std::vector<Vec2> seeds;
  std::vector<Vec2> shooting;
  std::size_t screened = 0;
  if (options.seed_every_node) {
    for (int j = 0; j < g; ++j)
      for (int i = 0; i < g; ++i)
        if (!mask || mask(node(i, j))) seeds.push_back(node(i, j));
  } else {
    const std::size_t count = static_cast<std::size_t>(g) * g;
    std::vector<Vec2> disp(count);
    std::vector<char> ok(count, 0);
    std::vector<char> inside(count, 1);
    parallel_for(count, [&](std::size_t k) {
      const Vec2 p = node(static_cast<int>(k % g), static_cast<int>(k / g));
      if (mask) inside[k] = mask(p) ? 1 : 0;
      try {
        disp[k] = f.iterate(p, n) - p;
        ok[k] = std::isfinite(disp[k].x) && std::isfinite(disp[k].y);
      } catch (const Error&) {
        ok[k] = 0;
      }
    });
    const double diag_len = std::hypot(dx, dy);
    for (int j = 0; j + 1 < g; ++j) {
      for (int i = 0; i + 1 < g; ++i) {
        const std::size_t c[4] = {static_cast<std::size_t>(j) * g + i, static_cast<std::size_t>(j) * g + i + 1,
                                  static_cast<std::size_t>(j + 1) * g + i + 1, static_cast<std::size_t>(j + 1) * g + i};
        const Vec2 center{region.xmin + (i + 0.5) * dx, region.ymin + (j + 0.5) * dy};
        if (mask && !(inside[c[0]] || inside[c[1]] || inside[c[2]] || inside[c[3]])) continue;
        int valid = 0;
        double min_d = std::numeric_limits<double>::infinity();
        double max_turn = 0.0;
        for (int a = 0; a < 4; ++a) {
          if (!ok[c[a]]) continue;
          ++valid;
          min_d = std::min(min_d, norm(disp[c[a]]));
          for (int b = a + 1; b < 4; ++b) {
            if (ok[c[b]]) max_turn = std::max(max_turn, std::abs(turn_angle(disp[c[a]], disp[c[b]])));
          }
        }
        if (valid == 0) continue;
        if (max_turn > kPi / 2 || min_d < diag_len || valid < 4) {
          seeds.push_back(center);
          ++screened;
        }
      }
    }
    if (options.shooting_seeds && n >= 2) {
      for (int j = 0; j < g; ++j) {
        for (int i = 0; i < g; ++i) {
          const std::size_t k = static_cast<std::size_t>(j) * g + i;
          if (!ok[k] || !inside[k]) continue;
          const double d = norm(disp[k]);
          bool minimum = true;
          for (int dj = -1; dj <= 1 && minimum; ++dj) {
            for (int di = -1; di <= 1; ++di) {
              const int ii = i + di, jj = j + dj;
              if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= g || jj >= g) continue;
              const std::size_t kk = static_cast<std::size_t>(jj) * g + ii;
              if (ok[kk] && norm(disp[kk]) < d) {
                minimum = false;
                break;
              }
            }
          }
          if (minimum) shooting.push_back(node(i, j));
        }
      }
    }
  }

  std::vector<NewtonResult> results(seeds.size() + shooting.size());
  parallel_for(results.size(), [&](std::size_t k) {
    results[k] = k < seeds.size() ? newton_refine(f, n, seeds[k], options.newton)
                                  : multiple_shooting_refine(f, n, shooting[k - seeds.size()], options.newton);
  });

  std::vector<Found> found;
  double max_res = 0.0;
  const double pad = 1e-9 * std::max({1.0, region.width(), region.height()});
  for (const auto& r : results) {
    if (!r.converged || r.residual > options.residual_tolerance) continue;
    const Vec2 p = r.point;
    if (p.x < region.xmin - pad || p.x > region.xmax + pad || p.y < region.ymin - pad || p.y > region.ymax + pad)
      continue;
    found.push_back({p, r.residual});
    max_res = std::max(max_res, r.residual);
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) { return lex_less(a.x, b.x); });
  std::vector<Found> unique;
  for (const auto& c : found) {
    bool dup = false;
    for (auto& u : unique) {
      if (distance(u.x, c.x) <= options.dedup_tolerance) {
        if (c.residual < u.residual) u = c;
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(c);
  }
  std::sort(unique.begin(), unique.end(), [](const Found& a, const Found& b) { return lex_less(a.x, b.x); });
  if (diag) {
    diag->grid = grid;
    diag->screened_cells = screened;
    diag->newton_runs = results.size();
    diag->converged = found.size();
    diag->max_residual = max_res;
  }
  return unique;
}

}  // namespace

std::vector<Vec2> find_fixed_point_set(const SmoothPlanarMap& f, int n, const Rect& region, int grid,
                                       const FixedPointSearchOptions& options, SearchDiagnostics* diagnostics,
                                       const std::function<bool(Vec2)>& mask) {
  std::vector<Vec2> out;
  for (const auto& u : sweep(f, n, region, grid, options, diagnostics, mask)) out.push_back(u.x);
  return out;
}

std::vector<FixedPointRecord> find_periodic_points(const SmoothPlanarMap& f, int n, const Rect& region, int grid,
                                                   const FixedPointSearchOptions& options,
                                                   SearchDiagnostics* diagnostics,
                                                   const std::function<bool(Vec2)>& mask) {
  const auto points = sweep(f, n, region, grid, options, diagnostics, mask);
  std::vector<char> used(points.size(), 0);
  std::vector<FixedPointRecord> records;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (used[i]) continue;
    FixedPointRecord probe = make_record(f, n, points[i].x);
    // Canonical representative: lexicographically smallest orbit point, preferring the
    // Newton-polished copy when the sweep found it too.
    Vec2 canon = probe.orbit.front();
    for (const Vec2& q : probe.orbit) {
      if (lex_less(q, canon)) canon = q;
    }
    for (std::size_t k = 0; k < points.size(); ++k) {
      for (const Vec2& q : probe.orbit) {
        if (distance(points[k].x, q) <= std::max(options.dedup_tolerance, 1e-8)) {
          used[k] = 1;
          if (distance(points[k].x, canon) <= std::max(options.dedup_tolerance, 1e-8)) canon = points[k].x;
        }
      }
    }
    if (canon != points[i].x) {
      const NewtonResult polished = newton_refine(f, n, canon, options.newton);
      if (polished.converged && distance(polished.point, canon) < options.dedup_tolerance) canon = polished.point;
    }
    bool duplicate = false;
    for (const auto& r : records) {
      if (distance(r.location, canon) <= options.dedup_tolerance) duplicate = true;
    }
    if (duplicate) continue;
    records.push_back(make_record(f, n, canon));
  }
  std::sort(records.begin(), records.end(),
            [](const FixedPointRecord& a, const FixedPointRecord& b) { return lex_less(a.location, b.location); });
  return records;
}

}  // namespace homcell
