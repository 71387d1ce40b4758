#include "ratex/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "ratex/errors.hpp"

namespace ratex {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string text;
  double number = 0.0;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Number: return "number";
    case Tok::Ident: return "identifier";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::End: return "end of input";
  }
  return "token";
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& variables) : text_(text), vars_(variables) {
    advance();
  }

  ExprPtr parse() {
    ExprPtr e = expr();
    if (tok_.kind != Tok::End) fail(std::string("unexpected ") + describe(tok_.kind), tok_.offset);
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t offset) const {
    int line = 1, column = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void advance() {
    skip_space();
    tok_ = Token{Tok::End, pos_, {}};
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    const std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      lex_identifier(start);
      return;
    }
    ++pos_;
    switch (c) {
      case '+': tok_.kind = Tok::Plus; break;
      case '-': tok_.kind = Tok::Minus; break;
      case '*': tok_.kind = Tok::Star; break;
      case '/': tok_.kind = Tok::Slash; break;
      case '^': tok_.kind = Tok::Caret; break;
      case '(': tok_.kind = Tok::LParen; break;
      case ')': tok_.kind = Tok::RParen; break;
      default: fail(std::string("unexpected character '") + c + "'", start);
    }
  }

  void lex_number(std::size_t start) {
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    tok_.kind = Tok::Number;
    tok_.text = std::string(text_.substr(start, pos_ - start));
    const auto res = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), tok_.number);
    if (res.ec != std::errc() || res.ptr != tok_.text.data() + tok_.text.size() || !std::isfinite(tok_.number)) {
      fail("malformed number '" + tok_.text + "'", start);
    }
  }

  void lex_identifier(std::size_t start) {
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    // Integer subscripts: name[-1][2]...
    while (pos_ < text_.size() && text_[pos_] == '[') {
      const std::size_t open = pos_++;
      skip_space();
      std::size_t num_start = pos_;
      if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      const std::size_t digits_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits_start) fail("expected integer subscript", open);
      int value = 0;
      const char* first = text_.data() + num_start + (text_[num_start] == '+' ? 1 : 0);
      std::from_chars(first, text_.data() + pos_, value);
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] != ']') fail("expected ']'", pos_);
      ++pos_;
      name += "[" + std::to_string(value) + "]";
    }
    tok_.kind = Tok::Ident;
    tok_.text = std::move(name);
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const auto kind = tok_.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Subtract;
      advance();
      lhs = binary(kind, lhs, term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const auto kind = tok_.kind == Tok::Star ? Expr::Kind::Multiply : Expr::Kind::Divide;
      advance();
      lhs = binary(kind, lhs, factor());
    }
    return lhs;
  }

  ExprPtr factor() {
    if (tok_.kind == Tok::Minus) {
      advance();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Negate;
      e->lhs = factor();
      return e;
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (tok_.kind != Tok::Caret) return base;
    advance();
    if (tok_.kind != Tok::Number || tok_.text.find_first_not_of("0123456789") != std::string::npos) {
      fail("exponent must be a non-negative integer literal", tok_.offset);
    }
    int k = 0;
    const auto res = std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), k);
    if (res.ec != std::errc()) fail("exponent too large", tok_.offset);
    advance();
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Power;
    e->exponent = k;
    e->lhs = base;
    return e;
  }

  ExprPtr atom() {
    auto e = std::make_shared<Expr>();
    switch (tok_.kind) {
      case Tok::Number:
        e->kind = Expr::Kind::Number;
        e->value = tok_.number;
        advance();
        return e;
      case Tok::Ident: {
        const auto it = std::find(vars_.begin(), vars_.end(), tok_.text);
        if (it == vars_.end()) fail("unknown identifier '" + tok_.text + "'", tok_.offset);
        e->kind = Expr::Kind::Identifier;
        e->name = tok_.text;
        e->slot = static_cast<int>(it - vars_.begin());
        advance();
        return e;
      }
      case Tok::LParen: {
        advance();
        ExprPtr inner = expr();
        if (tok_.kind != Tok::RParen) fail(std::string("expected ')' but found ") + describe(tok_.kind), tok_.offset);
        advance();
        return inner;
      }
      default:
        fail(std::string("unexpected ") + describe(tok_.kind), tok_.offset);
    }
  }

  static ExprPtr binary(Expr::Kind kind, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
  Token tok_{Tok::End, 0, {}};
};

const char* symbol(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add: return " + ";
    case Expr::Kind::Subtract: return " - ";
    case Expr::Kind::Multiply: return " * ";
    case Expr::Kind::Divide: return " / ";
    default: return "";
  }
}

void collect(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::Identifier && std::find(out.begin(), out.end(), e.name) == out.end()) {
    out.push_back(e.name);
  }
  if (e.lhs) collect(*e.lhs, out);
  if (e.rhs) collect(*e.rhs, out);
}

}  // namespace

ExprPtr parse_expression(std::string_view text, const std::vector<std::string>& variables) {
  return Parser(text, variables).parse();
}

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      return buf;
    }
    case Expr::Kind::Identifier: return e.name;
    case Expr::Kind::Negate: return "(-" + to_string(*e.lhs) + ")";
    case Expr::Kind::Power: return "(" + to_string(*e.lhs) + "^" + std::to_string(e.exponent) + ")";
    default: return "(" + to_string(*e.lhs) + symbol(e.kind) + to_string(*e.rhs) + ")";
  }
}

bool same_tree(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number: return a.value == b.value;
    case Expr::Kind::Identifier: return a.name == b.name;
    case Expr::Kind::Negate: return same_tree(*a.lhs, *b.lhs);
    case Expr::Kind::Power: return a.exponent == b.exponent && same_tree(*a.lhs, *b.lhs);
    default: return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

double evaluate(const Expr& e, const Vector& variables) {
  double v = 0.0;
  switch (e.kind) {
    case Expr::Kind::Number: return e.value;
    case Expr::Kind::Identifier:
      if (e.slot < 0 || e.slot >= variables.size()) {
        throw Error(ErrorKind::Evaluation, "no value for '" + e.name + "'");
      }
      return variables(e.slot);
    case Expr::Kind::Negate: return -evaluate(*e.lhs, variables);
    case Expr::Kind::Power: {
      const double base = evaluate(*e.lhs, variables);
      v = 1.0;
      for (int k = 0; k < e.exponent; ++k) v *= base;
      break;
    }
    case Expr::Kind::Add: v = evaluate(*e.lhs, variables) + evaluate(*e.rhs, variables); break;
    case Expr::Kind::Subtract: v = evaluate(*e.lhs, variables) - evaluate(*e.rhs, variables); break;
    case Expr::Kind::Multiply: v = evaluate(*e.lhs, variables) * evaluate(*e.rhs, variables); break;
    case Expr::Kind::Divide: {
      const double num = evaluate(*e.lhs, variables);
      const double den = evaluate(*e.rhs, variables);
      if (std::abs(den) < 1e-300) throw Error(ErrorKind::Evaluation, "division by zero in " + to_string(e));
      v = num / den;
      break;
    }
  }
  if (!std::isfinite(v)) throw Error(ErrorKind::Evaluation, "non-finite value in " + to_string(e));
  return v;
}

std::vector<std::string> identifiers(const Expr& e) {
  std::vector<std::string> out;
  collect(e, out);
  return out;
}

}  // namespace ratex
