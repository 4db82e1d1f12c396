#include "evt/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

namespace evt {

namespace {

enum class Op { kConst, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kExp, kLog, kSqrt };

}  // namespace

struct Expr::Node {
  Op op;
  double value = 0.0;  // kConst
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr constant(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::kConst;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      fail("unexpected trailing input at position " + std::to_string(pos_));
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error("expression '" + std::string(text_) + "': " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::kAdd, lhs, term());
      else if (accept('-'))
        lhs = make(Op::kSub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::kMul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::kDiv, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::kNeg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::kPow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return constant(v);
  }

  NodePtr ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "u") return make(Op::kVar);
    if (name == "pi") return constant(M_PI);
    if (name == "e") return constant(M_E);
    if (name == "inf") return constant(HUGE_VAL);
    if (!accept('(')) fail("unknown identifier '" + name + "'");
    std::vector<NodePtr> args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    if (!accept(')')) fail("missing ')' after arguments of '" + name + "'");
    if (name == "exp" && args.size() == 1) return make(Op::kExp, args[0]);
    if (name == "log" && args.size() == 1) return make(Op::kLog, args[0]);
    if (name == "sqrt" && args.size() == 1) return make(Op::kSqrt, args[0]);
    if (name == "pow" && args.size() == 2) return make(Op::kPow, args[0], args[1]);
    fail("unknown function '" + name + "' (or wrong argument count)");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double eval(const Expr::Node& n, double u) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return u;
    case Op::kNeg: return -eval(*n.lhs, u);
    case Op::kAdd: return eval(*n.lhs, u) + eval(*n.rhs, u);
    case Op::kSub: return eval(*n.lhs, u) - eval(*n.rhs, u);
    case Op::kMul: return eval(*n.lhs, u) * eval(*n.rhs, u);
    case Op::kDiv: return eval(*n.lhs, u) / eval(*n.rhs, u);
    case Op::kPow: return std::pow(eval(*n.lhs, u), eval(*n.rhs, u));
    case Op::kExp: return std::exp(eval(*n.lhs, u));
    case Op::kLog: return std::log(eval(*n.lhs, u));
    case Op::kSqrt: return std::sqrt(eval(*n.lhs, u));
  }
  return 0.0;  // unreachable
}

}  // namespace

Expr Expr::parse(std::string_view text) {
  Expr e;
  e.text_ = std::string(text);
  e.root_ = Parser(text).run();
  return e;
}

double Expr::operator()(double u) const { return eval(*root_, u); }

}  // namespace evt
