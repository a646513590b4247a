#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homcell/geometry.hpp"
#include "homcell/map_model.hpp"

namespace homcell {

enum class FixedPointClass { kDirectSaddle, kTwistedSaddle, kSink, kSource, kElliptic, kNonsimple, kReflectingSaddle };

const char* class_name(FixedPointClass c);

struct Classification {
  FixedPointClass cls = FixedPointClass::kNonsimple;
  bool borderline = false;
};

// Eigenvalue taxonomy. Imaginary parts below 1e-9 count as real; moduli within 1e-9 of 1
// are borderline and classified elliptic unless the eigenvalue is 1 itself (nonsimple).
// kReflectingSaddle covers real saddle pairs of opposite sign (orientation-reversing).
Classification classify_eigenvalues(const std::array<std::complex<double>, 2>& eig);

bool is_hyperbolic(FixedPointClass c);
bool is_saddle(FixedPointClass c);

struct FixedPointRecord {
  Vec2 location;
  int period = 1;
  int minimal_period = 1;
  std::array<std::complex<double>, 2> eigenvalues{};
  FixedPointClass cls = FixedPointClass::kNonsimple;
  bool borderline = false;
  std::optional<int> index;
  double residual = 0.0;
  std::vector<Vec2> orbit;  // location, f(location), ... (minimal_period points)
};

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;
  // Accepted when Newton stalls above `tolerance` but below this (integration noise).
  double stall_tolerance = 1e-10;
};

struct NewtonResult {
  bool converged = false;
  Vec2 point;
  double residual = 0.0;
  int iterations = 0;
  std::string failure;
};

// Damped Newton iteration on f^n(x) - x from `seed`.
NewtonResult newton_refine(const SmoothPlanarMap& f, int n, Vec2 seed, const NewtonOptions& options = {});

// Multiple shooting: Newton on (x_0, ..., x_{n-1}) with f(x_i) = x_{i+1 mod n}. Well conditioned
// for strongly expanding orbits where f^n - id is not. `residual` is max_i |f(x_i) - x_{i+1}|.
NewtonResult multiple_shooting_refine(const SmoothPlanarMap& f, int n, Vec2 seed, const NewtonOptions& options = {});

struct FixedPointSearchOptions {
  double dedup_tolerance = 1e-6;
  double residual_tolerance = 1e-10;
  // Newton from every grid node instead of only from cells flagged by the displacement screen.
  bool seed_every_node = false;
  // For n >= 2, also refine grid nodes where |f^n(x) - x| is a local minimum by multiple shooting.
  bool shooting_seeds = false;
  NewtonOptions newton;
};

struct SearchDiagnostics {
  int grid = 0;
  std::size_t screened_cells = 0;
  std::size_t newton_runs = 0;
  std::size_t converged = 0;
  double max_residual = 0.0;
};

// Fills eigenvalues, classification, minimal period and orbit for a fixed point of f^n.
FixedPointRecord make_record(const SmoothPlanarMap& f, int n, Vec2 x);

// Grid-seeded Newton search for fixed points of f^n in `region`. Each orbit is reported once,
// located at its lexicographically smallest point. `mask`, when given, restricts seeds.
std::vector<FixedPointRecord> find_periodic_points(const SmoothPlanarMap& f, int n, const Rect& region, int grid,
                                                   const FixedPointSearchOptions& options = {},
                                                   SearchDiagnostics* diagnostics = nullptr,
                                                   const std::function<bool(Vec2)>& mask = {});

// Same search, but returns every distinct fixed point of f^n (orbits are not collapsed).
std::vector<Vec2> find_fixed_point_set(const SmoothPlanarMap& f, int n, const Rect& region, int grid,
                                       const FixedPointSearchOptions& options = {},
                                       SearchDiagnostics* diagnostics = nullptr,
                                       const std::function<bool(Vec2)>& mask = {});

}  // namespace homcell
