#include <random>

#include "doctest.h"
#include "homcell/expression.hpp"

using namespace homcell;

namespace {

std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 10);
  const int k = pick(rng);
  switch (k) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(0, 99)(rng)) + ".25";
    case 1: return "x";
    case 2: return "y";
    case 3: return std::uniform_int_distribution<int>(0, 1)(rng) ? "a" : "beta";
    case 4: return random_expression(rng, depth - 1) + " + " + random_expression(rng, depth - 1);
    case 5: return random_expression(rng, depth - 1) + " - " + random_expression(rng, depth - 1);
    case 6: return random_expression(rng, depth - 1) + " * " + random_expression(rng, depth - 1);
    case 7: return random_expression(rng, depth - 1) + " / " + random_expression(rng, depth - 1);
    case 8: return "(" + random_expression(rng, depth - 1) + ")^" + std::to_string(std::uniform_int_distribution<int>(0, 4)(rng));
    case 9: {
      static const char* fns[] = {"sin", "cos", "exp", "sqrt"};
      return std::string(fns[std::uniform_int_distribution<int>(0, 3)(rng)]) + "(" + random_expression(rng, depth - 1) + ")";
    }
    default: return "-(" + random_expression(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("1000 random expressions round-trip structurally") {
  std::mt19937_64 rng(20240601);
  const std::vector<std::string> params{"a", "beta"};
  for (int i = 0; i < 1000; ++i) {
    const std::string src = random_expression(rng, 6);
    const ExpressionAst e1 = parse_expression(src, params);
    const std::string printed = e1.to_string();
    const ExpressionAst e2 = parse_expression(printed, params);
    INFO(src);
    REQUIRE(e1.structurally_equal(e2));
    CHECK(e2.to_string() == printed);
  }
}

TEST_CASE("precedence and associativity") {
  const std::vector<double> none;
  CHECK(parse_expression("2 + 3 * 4").evaluate(0, 0, none) == 14);
  CHECK(parse_expression("2 ^ 3 ^ 2").evaluate(0, 0, none) == 512);
  CHECK(parse_expression("-2 ^ 2").evaluate(0, 0, none) == 4);
  CHECK(parse_expression("8 / 4 / 2").evaluate(0, 0, none) == 1);
  CHECK(parse_expression("x - y - 1").evaluate(5, 2, none) == 2);
  CHECK(parse_expression("1e-3 * x").evaluate(2, 0, none) == doctest::Approx(2e-3));
}

TEST_CASE("parameters use sorted slots") {
  const ExpressionAst e = parse_expression("a * x + b", {"a", "b"});
  const std::vector<double> p{2.0, 3.0};
  CHECK(e.evaluate(1.5, 0, p) == 6.0);
}

TEST_CASE("parse errors carry the byte offset") {
  try {
    parse_expression("x + * y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(parse_expression("x + q"), ParseError);
  CHECK_THROWS_AS(parse_expression("sin(x"), ParseError);
  CHECK_THROWS_AS(parse_expression("x y"), ParseError);
}

TEST_CASE("domain errors") {
  const std::vector<double> none;
  auto domain = [&](const char* src, double x) {
    try {
      parse_expression(src).evaluate(x, 0, none);
    } catch (const Error& e) {
      return e.code() == ErrorCode::kDomain;
    }
    return false;
  };
  CHECK(domain("1 / x", 0));
  CHECK(domain("sqrt(x)", -1));
  CHECK(domain("x ^ 0.5", -2));
  CHECK(domain("x ^ y", 0));
  CHECK_FALSE(domain("x ^ 3", -2));
  CHECK_FALSE(domain("x ^ 0.5", 4));
}

TEST_CASE("dual evaluation matches central differences") {
  const ExpressionAst e = parse_expression("sin(x) * exp(y) + x^3 / (1 + y^2) - sqrt(2 + x*x)");
  const std::vector<double> none;
  for (double x : {-1.3, 0.2, 0.9}) {
    for (double y : {-0.7, 0.4}) {
      const Dual d = e.evaluate(Dual{x, 1, 0}, Dual{y, 0, 1}, none);
      const double h = 1e-6;
      const double fx = (e.evaluate(x + h, y, none) - e.evaluate(x - h, y, none)) / (2 * h);
      const double fy = (e.evaluate(x, y + h, none) - e.evaluate(x, y - h, none)) / (2 * h);
      CHECK(d.v == doctest::Approx(e.evaluate(x, y, none)));
      CHECK(d.dx == doctest::Approx(fx).epsilon(1e-7));
      CHECK(d.dy == doctest::Approx(fy).epsilon(1e-7));
    }
  }
}
