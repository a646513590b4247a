#include "homcell/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace homcell {
namespace expr {

NodePtr constant(double v) { return std::make_shared<const Node>(Node{Constant{v}, false}); }
NodePtr variable(int axis) { return std::make_shared<const Node>(Node{Variable{axis}, true}); }
NodePtr parameter(std::string name, int slot) {
  return std::make_shared<const Node>(Node{Parameter{std::move(name), slot}, false});
}
NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
  const bool dep = lhs->depends_on_xy || rhs->depends_on_xy;
  return std::make_shared<const Node>(Node{Binary{op, std::move(lhs), std::move(rhs)}, dep});
}
NodePtr unary(UnaryFn fn, NodePtr arg) {
  const bool dep = arg->depends_on_xy;
  return std::make_shared<const Node>(Node{Unary{fn, std::move(arg)}, dep});
}

const char* function_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::kNeg: return "neg";
    case UnaryFn::kSin: return "sin";
    case UnaryFn::kCos: return "cos";
    case UnaryFn::kExp: return "exp";
    case UnaryFn::kSqrt: return "sqrt";
  }
  return "?";
}

}  // namespace expr

namespace {

using namespace expr;

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorCode::kDomain, what); }

template <class T>
T eval_node(const Node& node, const T& x, const T& y, std::span<const double> params);

template <class T>
T eval_pow(const Node& lhs, const Node& rhs, const T& x, const T& y, std::span<const double> params) {
  const T base = eval_node(lhs, x, y, params);
  const T ex = eval_node(rhs, x, y, params);
  const double e = value_of(ex);
  const double b = value_of(base);
  if (!rhs.depends_on_xy && e == std::floor(e) && std::abs(e) <= 1e9) {
    if (b == 0.0 && e <= 0.0) domain_error("0 raised to a non-positive power");
    return integer_power(base, static_cast<long>(e));
  }
  if (b <= 0.0) domain_error("'^' needs a constant integer exponent or a positive base");
  using std::exp;
  using std::log;
  return exp(ex * log(base));
}

template <class T>
T eval_node(const Node& node, const T& x, const T& y, std::span<const double> params) {
  return std::visit(
      [&](const auto& n) -> T {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Constant>) {
          return T(n.value);
        } else if constexpr (std::is_same_v<N, Variable>) {
          return n.axis == 0 ? x : y;
        } else if constexpr (std::is_same_v<N, Parameter>) {
          return T(params[static_cast<std::size_t>(n.slot)]);
        } else if constexpr (std::is_same_v<N, Binary>) {
          if (n.op == BinaryOp::kPow) return eval_pow(*n.lhs, *n.rhs, x, y, params);
          const T a = eval_node(*n.lhs, x, y, params);
          const T b = eval_node(*n.rhs, x, y, params);
          switch (n.op) {
            case BinaryOp::kAdd: return a + b;
            case BinaryOp::kSub: return a - b;
            case BinaryOp::kMul: return a * b;
            case BinaryOp::kDiv:
              if (value_of(b) == 0.0) domain_error("division by zero");
              return a / b;
            case BinaryOp::kPow: break;
          }
          return a;
        } else {
          const T a = eval_node(*n.arg, x, y, params);
          using std::cos;
          using std::exp;
          using std::sin;
          using std::sqrt;
          switch (n.fn) {
            case UnaryFn::kNeg: return -a;
            case UnaryFn::kSin: return sin(a);
            case UnaryFn::kCos: return cos(a);
            case UnaryFn::kExp: return exp(a);
            case UnaryFn::kSqrt:
              if (value_of(a) < 0.0) domain_error("sqrt of a negative number");
              if constexpr (std::is_same_v<T, Dual>) {
                if (a.v == 0.0) domain_error("sqrt is not differentiable at 0");
              }
              return sqrt(a);
          }
          return a;
        }
      },
      node.payload);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const Node& node, const std::vector<std::string>& params, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Constant>) {
          if (n.value < 0.0) {
            out += "(-" + format_number(-n.value) + ")";
          } else {
            out += format_number(n.value);
          }
        } else if constexpr (std::is_same_v<N, Variable>) {
          out += n.axis == 0 ? "x" : "y";
        } else if constexpr (std::is_same_v<N, Parameter>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, Binary>) {
          static constexpr const char* kOps[] = {" + ", " - ", " * ", " / ", " ^ "};
          out += '(';
          print_node(*n.lhs, params, out);
          out += kOps[static_cast<int>(n.op)];
          print_node(*n.rhs, params, out);
          out += ')';
        } else {
          if (n.fn == UnaryFn::kNeg) {
            out += "(-";
            print_node(*n.arg, params, out);
            out += ')';
          } else {
            out += function_name(n.fn);
            out += '(';
            print_node(*n.arg, params, out);
            out += ')';
          }
        }
      },
      node.payload);
}

// --- parser -----------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& params) : src_(src), params_(params) {}

  NodePtr parse() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}, "unexpected trailing input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const { fail_at(pos_, std::move(expected), what); }

  [[noreturn]] void fail_at(std::size_t at, std::vector<std::string> expected, const std::string& what) const {
    std::ostringstream msg;
    msg << what << " at byte " << at;
    if (!expected.empty()) {
      msg << "; expected one of:";
      for (const auto& e : expected) msg << ' ' << e;
    }
    throw ParseError(at, std::move(expected), msg.str());
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      if (accept('+')) lhs = binary(BinaryOp::kAdd, lhs, parse_term());
      else if (accept('-')) lhs = binary(BinaryOp::kSub, lhs, parse_term());
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (true) {
      if (accept('*')) lhs = binary(BinaryOp::kMul, lhs, parse_factor());
      else if (accept('/')) lhs = binary(BinaryOp::kDiv, lhs, parse_factor());
      else return lhs;
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    if (accept('^')) return binary(BinaryOp::kPow, base, parse_factor());
    return base;
  }

  NodePtr parse_unary() {
    if (accept('-')) return unary(UnaryFn::kNeg, parse_atom());
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_ws();
    static const std::vector<std::string> kAtomStart{"number", "identifier", "'('", "'-'"};
    if (pos_ >= src_.size()) fail(kAtomStart, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!accept(')')) fail({"')'"}, "missing closing parenthesis");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(kAtomStart, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) { ++pos_; ++n; }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail_at(start, {"number"}, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    const std::string text(src_.substr(start, pos_ - start));
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) fail_at(start, {"number"}, "malformed number");
    return constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name(src_.substr(start, pos_ - start));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      static const std::map<std::string, UnaryFn> kFunctions{{"sin", UnaryFn::kSin}, {"cos", UnaryFn::kCos},
                                                             {"exp", UnaryFn::kExp}, {"sqrt", UnaryFn::kSqrt},
                                                             {"neg", UnaryFn::kNeg}};
      const auto it = kFunctions.find(name);
      if (it == kFunctions.end()) fail_at(start, {"sin", "cos", "exp", "sqrt", "neg"}, "unknown function '" + name + "'");
      ++pos_;
      NodePtr arg = parse_expr();
      if (!accept(')')) fail({"')'"}, "missing closing parenthesis");
      return unary(it->second, arg);
    }
    if (name == "x") return variable(0);
    if (name == "y") return variable(1);
    const auto it = std::find(params_.begin(), params_.end(), name);
    if (it == params_.end()) fail_at(start, {"x", "y", "declared parameter"}, "unknown identifier '" + name + "'");
    return parameter(name, static_cast<int>(it - params_.begin()));
  }

  std::string_view src_;
  const std::vector<std::string>& params_;
  std::size_t pos_ = 0;
};

}  // namespace

ExpressionAst::ExpressionAst(expr::NodePtr root, std::vector<std::string> parameter_names)
    : root_(std::move(root)), params_(std::move(parameter_names)) {
  if (!root_) throw Error(ErrorCode::kInvalidArgument, "empty expression");
}

double ExpressionAst::evaluate(double x, double y, std::span<const double> params) const {
  return eval_node<double>(*root_, x, y, params);
}

Dual ExpressionAst::evaluate(Dual x, Dual y, std::span<const double> params) const {
  return eval_node<Dual>(*root_, x, y, params);
}

std::string ExpressionAst::to_string() const {
  std::string out;
  print_node(*root_, params_, out);
  return out;
}

bool structurally_equal(const expr::Node& a, const expr::Node& b) {
  if (a.payload.index() != b.payload.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using N = std::decay_t<decltype(na)>;
        const N& nb = std::get<N>(b.payload);
        if constexpr (std::is_same_v<N, Constant>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<N, Variable>) {
          return na.axis == nb.axis;
        } else if constexpr (std::is_same_v<N, Parameter>) {
          return na.name == nb.name;
        } else if constexpr (std::is_same_v<N, Binary>) {
          return na.op == nb.op && structurally_equal(*na.lhs, *nb.lhs) && structurally_equal(*na.rhs, *nb.rhs);
        } else {
          return na.fn == nb.fn && structurally_equal(*na.arg, *nb.arg);
        }
      },
      a.payload);
}

bool ExpressionAst::structurally_equal(const ExpressionAst& other) const {
  return homcell::structurally_equal(*root_, *other.root_);
}

ExpressionAst parse_expression(std::string_view source, std::vector<std::string> parameter_names) {
  Parser parser(source, parameter_names);
  NodePtr root = parser.parse();
  return ExpressionAst(std::move(root), std::move(parameter_names));
}

}  // namespace homcell
