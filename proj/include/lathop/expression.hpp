#pragma once

#include <array>
#include <memory>
#include <string>

namespace lathop {

/// Compiled target-field expression over coordinates x0, x1, x2.
///
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('+' | '-') unary | power
///   power  := atom ('^' unary)?          right associative
///   atom   := number | 'pi' | x0 | x1 | x2 | func '(' expr ')' | '(' expr ')'
///   func   := sin | cos | exp
///
/// Parse errors throw InputError with the failing column.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);

  double operator()(const std::array<double, 3>& x) const;
  const std::string& source() const { return source_; }
  // highest coordinate index referenced, -1 for none
  int max_variable() const { return max_var_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
  int max_var_ = -1;
};

}  // namespace lathop
