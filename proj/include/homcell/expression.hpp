#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "homcell/dual.hpp"
#include "homcell/errors.hpp"

namespace homcell {

using ParamTable = std::map<std::string, double>;

namespace expr {

enum class BinaryOp { kAdd, kSub, kMul, kDiv, kPow };
enum class UnaryFn { kNeg, kSin, kCos, kExp, kSqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant { double value; };
struct Variable { int axis; };  // 0 = x, 1 = y
struct Parameter { std::string name; int slot; };
struct Binary { BinaryOp op; NodePtr lhs, rhs; };
struct Unary { UnaryFn fn; NodePtr arg; };

struct Node {
  std::variant<Constant, Variable, Parameter, Binary, Unary> payload;
  bool depends_on_xy = false;
};

NodePtr constant(double v);
NodePtr variable(int axis);
NodePtr parameter(std::string name, int slot);
NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs);
NodePtr unary(UnaryFn fn, NodePtr arg);

const char* function_name(UnaryFn fn);

}  // namespace expr

// Immutable arithmetic expression in x, y and named parameters.
// Parameter slots index into the sorted parameter-name list given to the parser.
class ExpressionAst {
 public:
  ExpressionAst(expr::NodePtr root, std::vector<std::string> parameter_names);

  const expr::Node& root() const { return *root_; }
  const expr::NodePtr& root_ptr() const { return root_; }
  const std::vector<std::string>& parameter_names() const { return params_; }

  // Throws Error(kDomain) on division by zero, sqrt of a negative number, 0^(n<=0),
  // or a non-integer / variable exponent applied to a non-positive base.
  double evaluate(double x, double y, std::span<const double> params) const;
  Dual evaluate(Dual x, Dual y, std::span<const double> params) const;

  // Fully parenthesised text that parses back to the same tree.
  std::string to_string() const;

  bool structurally_equal(const ExpressionAst& other) const;

 private:
  expr::NodePtr root_;
  std::vector<std::string> params_;
};

// expr   := term (('+'|'-') term)*
// term   := factor (('*'|'/') factor)*
// factor := unary ('^' factor)?
// unary  := ('-')? atom
// atom   := number | ident | ident '(' expr ')' | '(' expr ')'
// Identifiers other than x, y and the functions must appear in `parameter_names`.
ExpressionAst parse_expression(std::string_view source, std::vector<std::string> parameter_names = {});

bool structurally_equal(const expr::Node& a, const expr::Node& b);

}  // namespace homcell
