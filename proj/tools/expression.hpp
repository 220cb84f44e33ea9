#pragma once

// Arithmetic expressions over named variables, for F in config files.
// Grammar: + - * / ^, unary minus, parentheses, numbers, `pi`, variables and
// sin cos tan exp log sqrt abs sinh cosh tanh.

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace splitma::cli {

class Expression {
 public:
  /// Throws splitma::Error(Config) on syntax errors or unknown names.
  Expression(const std::string& text, std::vector<std::string> variables);

  double operator()(std::span<const double> values) const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
};

}  // namespace splitma::cli
