#include "expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

#include "splitma/errors.hpp"

namespace splitma::cli {

struct Expression::Node {
  enum class Kind { Number, Variable, Negate, Binary, Call } kind = Kind::Number;
  double number = 0.0;
  std::size_t variable = 0;
  char op = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(std::span<const double> v) const {
    switch (kind) {
      case Kind::Number: return number;
      case Kind::Variable: return v[variable];
      case Kind::Negate: return -lhs->eval(v);
      case Kind::Call: return fn(lhs->eval(v));
      case Kind::Binary: break;
    }
    const double a = lhs->eval(v), b = rhs->eval(v);
    switch (op) {
      case '+': return a + b;
      case '-': return a - b;
      case '*': return a * b;
      case '/': return a / b;
      default: return std::pow(a, b);
    }
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

const std::map<std::string, double (*)(double)>& functions() {
  static const std::map<std::string, double (*)(double)> m{
      {"sin", [](double x) { return std::sin(x); }},   {"cos", [](double x) { return std::cos(x); }},
      {"tan", [](double x) { return std::tan(x); }},   {"exp", [](double x) { return std::exp(x); }},
      {"log", [](double x) { return std::log(x); }},   {"sqrt", [](double x) { return std::sqrt(x); }},
      {"abs", [](double x) { return std::abs(x); }},   {"sinh", [](double x) { return std::sinh(x); }},
      {"cosh", [](double x) { return std::cosh(x); }}, {"tanh", [](double x) { return std::tanh(x); }},
  };
  return m;
}

std::shared_ptr<Expression::Node> make(Kind kind) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  return n;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Config, "expression \"" + s_ + "\" at " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = make(Kind::Binary);
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (eat('+')) n = binary('+', n, product());
      else if (eat('-')) n = binary('-', n, product());
      else return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (eat('*')) n = binary('*', n, unary());
      else if (eat('/')) n = binary('/', n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (eat('-')) {
      auto n = make(Kind::Negate);
      n->lhs = unary();
      return n;
    }
    if (eat('+')) return unary();
    return power();
  }

  // right associative; binds tighter than unary minus on its left
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      NodePtr n = sum();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += std::size_t(end - begin);
      auto n = make(Kind::Number);
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (auto f = functions().find(name); f != functions().end()) {
        if (!eat('(')) fail("expected '(' after " + name);
        auto n = make(Kind::Call);
        n->fn = f->second;
        n->lhs = sum();
        if (!eat(')')) fail("missing ')'");
        return n;
      }
      if (name == "pi") {
        auto n = make(Kind::Number);
        n->number = std::numbers::pi;
        return n;
      }
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) {
          auto n = make(Kind::Variable);
          n->variable = i;
          return n;
        }
      }
      pos_ = start;
      fail("unknown name '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text, std::vector<std::string> variables)
    : root_(Parser(text, variables).parse()) {}

double Expression::operator()(std::span<const double> values) const { return root_->eval(values); }

}  // namespace splitma::cli
