#include "swatsim/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace swatsim {

struct Expr::Node {
  enum class Op {
    Number, Tag, Setpoint, Memory,
    Or, And, Not, Neg,
    Eq, Ne, Lt, Le, Gt, Ge,
    Add, Sub, Mul, Div,
    Abs, Min, Max,
  };
  Op op;
  double value = 0.0;
  std::string name;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expr::Node;
using Op = Node::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

void add_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    auto n = parse_or();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

  std::vector<std::string> tags, setpoints, memory;

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (src_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  NodePtr parse_or() {
    auto lhs = parse_and();
    while (accept("||")) lhs = make(Op::Or, {lhs, parse_and()});
    return lhs;
  }

  NodePtr parse_and() {
    auto lhs = parse_not();
    while (accept("&&")) lhs = make(Op::And, {lhs, parse_not()});
    return lhs;
  }

  NodePtr parse_not() {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '!' && src_.substr(pos_, 2) != "!=") {
      ++pos_;
      return make(Op::Not, {parse_not()});
    }
    return parse_cmp();
  }

  NodePtr parse_cmp() {
    auto lhs = parse_sum();
    static const std::pair<std::string_view, Op> ops[] = {
        {"==", Op::Eq}, {"!=", Op::Ne}, {"<=", Op::Le}, {">=", Op::Ge}, {"<", Op::Lt}, {">", Op::Gt}};
    for (auto [tok, op] : ops)
      if (accept(tok)) return make(op, {lhs, parse_sum()});
    return lhs;
  }

  NodePtr parse_sum() {
    auto lhs = parse_prod();
    for (;;) {
      if (accept("+")) lhs = make(Op::Add, {lhs, parse_prod()});
      else if (accept("-")) lhs = make(Op::Sub, {lhs, parse_prod()});
      else return lhs;
    }
  }

  NodePtr parse_prod() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept("*")) lhs = make(Op::Mul, {lhs, parse_unary()});
      else if (accept("/")) lhs = make(Op::Div, {lhs, parse_unary()});
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept("-")) return make(Op::Neg, {parse_unary()});
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = parse_or();
      expect(")");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.data() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->op = Op::Number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '.'))
        ++pos_;
      std::string ident(src_.substr(start, pos_ - start));
      if (accept("(")) return parse_call(ident, start);
      return resolve_ident(ident);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_call(const std::string& fn, std::size_t at) {
    std::vector<NodePtr> args{parse_or()};
    while (accept(",")) args.push_back(parse_or());
    expect(")");
    auto arity = [&](std::size_t n) {
      if (args.size() != n) {
        pos_ = at;
        fail(fn + "() takes " + std::to_string(n) + " argument(s)");
      }
    };
    if (fn == "abs") { arity(1); return make(Op::Abs, std::move(args)); }
    if (fn == "min") { arity(2); return make(Op::Min, std::move(args)); }
    if (fn == "max") { arity(2); return make(Op::Max, std::move(args)); }
    pos_ = at;
    fail("unknown function '" + fn + "'");
  }

  NodePtr resolve_ident(const std::string& ident) {
    auto n = std::make_shared<Node>();
    if (auto p = parse_position(ident)) {
      n->op = Op::Number;
      n->value = position_code(*p);
    } else if (TagRegistry::swat().contains(ident)) {
      n->op = Op::Tag;
      n->name = ident;
      add_unique(tags, ident);
    } else if (ident.find('.') != std::string::npos) {
      n->op = Op::Setpoint;
      n->name = ident;
      add_unique(setpoints, ident);
    } else {
      n->op = Op::Memory;
      n->name = ident;
      add_unique(memory, ident);
    }
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::optional<double> eval_node(const Node& n, const EvalContext& ctx) {
  auto arg = [&](std::size_t i) { return eval_node(*n.args[i], ctx); };
  auto b = [](bool v) { return std::optional<double>(v ? 1.0 : 0.0); };
  switch (n.op) {
    case Op::Number: return n.value;
    case Op::Tag: return ctx.tag(n.name);
    case Op::Setpoint: return ctx.setpoint(n.name);
    case Op::Memory: return ctx.memory(n.name);
    case Op::Not: {
      auto a = arg(0);
      if (!a) return std::nullopt;
      return b(*a == 0.0);
    }
    case Op::Neg: {
      auto a = arg(0);
      if (!a) return std::nullopt;
      return -*a;
    }
    case Op::Abs: {
      auto a = arg(0);
      if (!a) return std::nullopt;
      return std::fabs(*a);
    }
    default: break;
  }
  auto x = arg(0);
  auto y = arg(1);
  if (!x || !y) return std::nullopt;
  switch (n.op) {
    case Op::Or: return b(*x != 0.0 || *y != 0.0);
    case Op::And: return b(*x != 0.0 && *y != 0.0);
    case Op::Eq: return b(*x == *y);
    case Op::Ne: return b(*x != *y);
    case Op::Lt: return b(*x < *y);
    case Op::Le: return b(*x <= *y);
    case Op::Gt: return b(*x > *y);
    case Op::Ge: return b(*x >= *y);
    case Op::Add: return *x + *y;
    case Op::Sub: return *x - *y;
    case Op::Mul: return *x * *y;
    case Op::Div: return *y == 0.0 ? std::nullopt : std::optional<double>(*x / *y);
    case Op::Min: return std::min(*x, *y);
    case Op::Max: return std::max(*x, *y);
    default: return std::nullopt;
  }
}

}  // namespace

Expr Expr::parse(std::string_view text) {
  Parser p(text);
  Expr e;
  e.root_ = p.parse_all();
  e.text_ = std::string(text);
  e.tags_ = std::move(p.tags);
  e.setpoints_ = std::move(p.setpoints);
  e.memory_ = std::move(p.memory);
  return e;
}

Expr Expr::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Number;
  n->value = v;
  Expr e;
  e.root_ = n;
  e.text_ = std::to_string(v);
  return e;
}

std::optional<double> Expr::eval(const EvalContext& ctx) const {
  if (!root_) return std::nullopt;
  return eval_node(*root_, ctx);
}

std::optional<bool> Expr::test(const EvalContext& ctx) const {
  auto v = eval(ctx);
  if (!v) return std::nullopt;
  return *v != 0.0;
}

}  // namespace swatsim
