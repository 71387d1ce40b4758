#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ratex/laurent_matrix.hpp"

namespace ratex {

/// Expression tree for the parameter language.
///
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := '-' factor | power
///   power  := atom ('^' INT)?
///   atom   := NUMBER | IDENT | '(' expr ')'
///
/// so ^ binds tighter than unary minus, which binds tighter than * and /.
/// Identifiers may carry integer subscripts, as in B[-1][1][1].
struct Expr {
  enum class Kind { Number, Identifier, Negate, Add, Subtract, Multiply, Divide, Power };

  Kind kind = Kind::Number;
  double value = 0.0;
  std::string name;
  /// Index of `name` in the variable list given to the parser.
  int slot = -1;
  int exponent = 0;
  std::shared_ptr<const Expr> lhs;
  std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Parses `text`, resolving identifiers against `variables`. Throws
/// ParseError with a 1-based line and column on syntax errors and unknown
/// identifiers.
ExprPtr parse_expression(std::string_view text, const std::vector<std::string>& variables);

/// Fully parenthesized rendering that parses back to the same tree.
std::string to_string(const Expr& e);

bool same_tree(const Expr& a, const Expr& b);

/// Evaluates with variables[slot]; throws Evaluation on a denominator below
/// 1e-300 in magnitude or a non-finite result.
double evaluate(const Expr& e, const Vector& variables);

/// Identifiers occurring in the tree, in first-appearance order.
std::vector<std::string> identifiers(const Expr& e);

}  // namespace ratex
