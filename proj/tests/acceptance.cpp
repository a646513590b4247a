// Acceptance run: one line per criterion, exit 1 when any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "homcell/expression.hpp"
#include "homcell/index.hpp"
#include "homcell/periodic_cell.hpp"
#include "homcell/scenario.hpp"
#include "homcell/sphere.hpp"

using namespace homcell;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

Vec2 cpow(Vec2 z, int k) {
  const auto w = std::pow(std::complex<double>(z.x, z.y), k);
  return {w.real(), w.imag()};
}

Outcome index_table() {
  Outcome o;
  using fixtures::linear;
  o.require(index_at_point(linear(0.5, 0, 0, 2), 1, {0, 0}) == -1, "direct saddle");
  o.require(index_at_point(linear(-0.5, 0, 0, -2), 1, {0, 0}) == 1, "twisted saddle");
  o.require(index_at_point(linear(0.5, 0, 0, 0.3), 1, {0, 0}) == 1, "sink");
  o.require(index_at_point(linear(2, 0, 0, 3), 1, {0, 0}) == 1, "source");
  o.require(index_at_point(fixtures::rotation(0.9), 1, {0, 0}) == 1, "elliptic");
  return o;
}

Outcome winding_oracle() {
  Outcome o;
  struct F {
    DisplacementFn v;
    Vec2 c;
    double r;
    int expected;
  };
  std::vector<F> fx;
  for (int k = 1; k <= 5; ++k) {
    fx.push_back({[k](Vec2 z) { return cpow(z, k); }, {0, 0}, 0.5, k});
    fx.push_back({[k](Vec2 z) { return cpow(z, k); }, {0.1, -0.05}, 1.3, k});
    fx.push_back({[k](Vec2 z) { return cpow({z.x, -z.y}, k); }, {0, 0}, 0.7, -k});
  }
  auto two = [](Vec2 z) {
    const auto c = (std::complex<double>(z.x, z.y) - 0.5) * (std::complex<double>(z.x, z.y) + 0.5);
    return Vec2{c.real(), c.imag()};
  };
  fx.push_back({two, {0, 0}, 1.0, 2});
  fx.push_back({two, {0.5, 0}, 0.3, 1});
  fx.push_back({two, {0, 2}, 0.5, 0});
  fx.push_back({[](Vec2 z) { return Vec2{z.x * (1 - z.x), -z.y}; }, {0.5, 0}, 1.0, 0});
  fx.push_back({[](Vec2 z) {
                  const auto c = std::exp(std::complex<double>(z.x, z.y)) - 1.0;
                  return Vec2{c.real(), c.imag()};
                },
                {0, 0}, 1.0, 1});
  int i = 0;
  for (const auto& f : fx) {
    const int adaptive = winding_of_displacement(f.v, circle_polygon(f.c, f.r)).degree;
    const int dense = fixtures::dense_winding(f.v, f.c, f.r);
    o.require(adaptive == dense && dense == f.expected, "fixture " + std::to_string(i));
    ++i;
  }
  o.require(fx.size() == 20, "fixture count");
  return o;
}

Outcome duffing_theorem_a() {
  Outcome o;
  const auto& d = fixtures::duffing_lobe();
  o.require(d.cell->sign == CellSign::kPositive && d.cell->rho == 1, "cell is not positive");
  const auto reports = verify_theorem_A(d.f, d.cell, 4);
  for (const auto& b : reports) {
    const std::string n = "n=" + std::to_string(b.n);
    o.require(b.block_index && *b.block_index == 1, n + " block index");
    o.require(b.points.size() == 1 && distance(b.points[0], {1, 0}) < 1e-8, n + " interior fixed point");
  }
  o.require(reports.size() == 4, "report count");
  return o;
}

Outcome manifold_fidelity() {
  Outcome o;
  const auto& d = fixtures::duffing_lobe();
  double energy = 0;
  for (const auto* b : {&d.wu, &d.ws})
    for (const Vec2& p : b->polyline) energy = std::max(energy, std::abs(fixtures::duffing_energy(p)));
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(1.0, d.wu.t_max() - 1.0);
  double eq = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    eq = std::max(eq, distance(d.f.eval(zeta(d.wu, t)), zeta(d.wu, t + 1)));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |H| %.2e, equivariance %.2e", energy, eq);
  o.require(energy < 1e-6 && eq < 1e-5, buf);
  o.detail = o.pass ? buf : o.detail;
  return o;
}

Outcome tangle() {
  Outcome o;
  const auto& h = fixtures::henon_tangle();
  bool transversal = false;
  for (const auto& p : h.points) transversal = transversal || p.transversal;
  o.require(transversal, "no transversal homoclinic point");
  o.require(h.cell->loop.simple, "loop not simple");
  std::ostringstream s;
  s << "rho " << h.cell->rho << ";";
  for (int n = 1; n <= 3; ++n) {
    const auto b = find_block(h.f, h.cell, n);
    s << " n=" << n << ":" << b.verdict << "/" << b.cross_check;
    if (b.verdict == "non_certifiable") {
      o.require(!b.diagnostics.empty(), "non-certifiable without diagnostics");
      continue;
    }
    o.require(b.verdict == "match" && b.block_index && *b.block_index == h.cell->rho, "block index differs from rho");
    o.require(b.cross_check == "agree", "cross-check did not agree at n=" + std::to_string(n));
  }
  if (o.pass) o.detail = s.str();
  return o;
}

Outcome sphere() {
  Outcome o;
  SphereSearchOptions opts;
  opts.grid = 120;
  const SphereMap ns{fixtures::linear(2, 0, 0, 2), fixtures::linear(0.5, 0, 0, 0.5)};
  const SphereMap rot{fixtures::rotation(0.7), fixtures::rotation(-0.7)};
  const SphereMap duf{builtin_map("duffing_sphere_north"), builtin_map("duffing_sphere_south"), 2.0, 4.0};
  o.require(total_index(ns, opts).total == 2, "north-south total");
  o.require(total_index(rot, opts).total == 2, "rotation total");
  const auto total = total_index(duf, opts);
  o.require(total.total == 2 && total.circle_degree == 2, "duffing sphere total");
  const auto& d = fixtures::duffing_lobe();
  const auto c = component_indices(duf, *d.cell);
  o.require(c.is_one_two && c.cell_index + c.outer_index + c.saddle_index == 2, "component indices");
  const auto lef = lefschetz_bound_check(indexed_points(total), *d.cell);
  o.require(lef.satisfied && lef.weak_satisfied && lef.lefschetz == 2, "Lefschetz bound");
  if (o.pass) {
    o.detail = "components " + std::to_string(c.cell_index) + " + " + std::to_string(c.outer_index) + " + (" +
               std::to_string(c.saddle_index) + ") = 2; #Fix " + std::to_string(lef.fixed_points) + " >= " +
               std::to_string(lef.bound);
  }
  return o;
}

std::string random_expression(std::mt19937_64& rng, int depth) {
  const int k = std::uniform_int_distribution<int>(0, depth <= 0 ? 3 : 10)(rng);
  auto sub = [&] { return random_expression(rng, depth - 1); };
  switch (k) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(0, 99)(rng)) + ".5";
    case 1: return "x";
    case 2: return "y";
    case 3: return "a";
    case 4: return sub() + " + " + sub();
    case 5: return sub() + " - " + sub();
    case 6: return sub() + " * " + sub();
    case 7: return sub() + " / " + sub();
    case 8: return "(" + sub() + ")^" + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng));
    case 9: return "cos(" + sub() + ")";
    default: return "-(" + sub() + ")";
  }
}

Outcome parser_and_ad() {
  Outcome o;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto e = parse_expression(random_expression(rng, 6), {"a"});
    const auto back = parse_expression(e.to_string(), {"a"});
    if (!e.structurally_equal(back)) {
      o.require(false, "round trip " + std::to_string(i));
      break;
    }
  }
  const std::map<std::string, ParamTable> params{{"linear_saddle", {{"lambda", 0.5}, {"mu", 2}}},
                                                 {"twisted_linear_saddle", {{"lambda", -0.5}, {"mu", -2}}},
                                                 {"linear", {{"a11", 1.2}, {"a12", 0.3}, {"a21", -0.4}, {"a22", 0.9}}},
                                                 {"henon", {{"a", 1.4}, {"b", 0.3}}},
                                                 {"area_preserving_henon", {{"alpha", 10}}}};
  for (const auto& e : builtin_zoo()) {
    const auto it = params.find(e.name);
    const auto f = builtin_map(e.name, it == params.end() ? ParamTable{} : it->second);
    for (Vec2 x : {Vec2{0.3, -0.2}, Vec2{-0.8, 0.5}, Vec2{1.1, 0.7}}) {
      const Mat2 fd = finite_difference_jacobian(f, x);
      const Mat2 ad = f.has_dual_jacobian() ? f.dual_jacobian(x) : f.jacobian(x);
      o.require(max_abs(ad - fd) / std::max(1.0, max_abs(fd)) < 1e-5, e.name);
    }
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  int n = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(HOMCELL_SOURCE_DIR) / "scenarios")) {
    if (entry.path().extension() != ".json") continue;
    const auto cfg = load_scenario(entry.path());
    const auto a = strip_timings(run_scenario(cfg).report).dump();
    const auto b = strip_timings(run_scenario(cfg).report).dump();
    o.require(a == b, entry.path().filename().string());
    ++n;
  }
  o.require(n >= 7, "fewer scenarios than expected");
  if (o.pass) o.detail = std::to_string(n) + " scenarios";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds; 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "index table on linear fixtures", 1.0, index_table},
      {2, "adaptive degree vs dense winding oracle", 30.0, winding_oracle},
      {3, "duffing lobe: theorem A, n = 1..4", 60.0, duffing_theorem_a},
      {4, "duffing separatrix fidelity", 30.0, manifold_fidelity},
      {5, "henon tangle: block index vs rho", 120.0, tangle},
      {6, "sphere: total index, components, Lefschetz bound", 30.0, sphere},
      {7, "parser round-trips and AD Jacobians", 10.0, parser_and_ad},
      {8, "shipped scenarios are deterministic", 0.0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0 && secs > c.limit) o.require(false, "over the time limit");
    std::printf("[%s] %d %s (%.2f s%s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.limit > 0 ? (", limit " + std::to_string(static_cast<int>(c.limit)) + " s").c_str() : "",
                o.detail.empty() ? "" : ": ", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
