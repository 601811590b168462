#include "lathop/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "lathop/lattice.hpp"

namespace lathop {

struct Expression::Node {
  enum class Kind { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp };
  Kind kind;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }
  int max_var() const { return max_var_; }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("expression '" + s_ + "': " + why + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (accept('+'))
        l = make(Kind::add, l, term());
      else if (accept('-'))
        l = make(Kind::sub, l, term());
      else
        return l;
    }
  }

  NodePtr term() {
    NodePtr l = unary();
    for (;;) {
      if (accept('*'))
        l = make(Kind::mul, l, unary());
      else if (accept('/'))
        l = make(Kind::div, l, unary());
      else
        return l;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Kind::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail("unexpected character");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto res = std::from_chars(first, s_.data() + s_.size(), v);
    if (res.ec != std::errc{}) fail("bad number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = v;
    return n;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string w = s_.substr(start, pos_ - start);
    if (w == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = Kind::constant;
      n->value = std::numbers::pi;
      return n;
    }
    if (w == "x0" || w == "x1" || w == "x2") {
      auto n = std::make_shared<Node>();
      n->kind = Kind::variable;
      n->var = w[1] - '0';
      max_var_ = std::max(max_var_, n->var);
      return n;
    }
    Kind k;
    if (w == "sin")
      k = Kind::sin;
    else if (w == "cos")
      k = Kind::cos;
    else if (w == "exp")
      k = Kind::exp;
    else {
      pos_ = start;
      fail("unknown identifier '" + w + "'");
    }
    if (!accept('(')) fail("expected '(' after " + w);
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    return make(k, arg);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int max_var_ = -1;
};

double eval(const Node& n, const std::array<double, 3>& x) {
  switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::variable: return x[n.var];
    case Kind::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Kind::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Kind::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Kind::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Kind::pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
    case Kind::neg: return -eval(*n.lhs, x);
    case Kind::sin: return std::sin(eval(*n.lhs, x));
    case Kind::cos: return std::cos(eval(*n.lhs, x));
    case Kind::exp: return std::exp(eval(*n.lhs, x));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.run();
  e.source_ = text;
  e.max_var_ = p.max_var();
  return e;
}

double Expression::operator()(const std::array<double, 3>& x) const { return eval(*root_, x); }

}  // namespace lathop
