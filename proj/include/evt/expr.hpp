#ifndef EVT_EXPR_HPP
#define EVT_EXPR_HPP

#include <memory>
#include <string>
#include <string_view>

#include "evt/errors.hpp"

namespace evt {

// Small arithmetic expression in one variable `u`, used by the von Mises
// spec files for the auxiliary function g.
//
// Grammar (see README for the user-facing description):
//   expr    := term  { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' unary ]          (right associative)
//   primary := NUMBER | 'u' | IDENT '(' expr { ',' expr } ')' | '(' expr ')'
// Functions: exp(x), log(x), sqrt(x), pow(x, y).
class Expr {
 public:
  static Expr parse(std::string_view text);  // throws parse_error

  double operator()(double u) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace evt

#endif  // EVT_EXPR_HPP
