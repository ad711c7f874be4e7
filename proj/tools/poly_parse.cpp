#include "poly_parse.hpp"

#include <cctype>

namespace pb::cli {

namespace {

using poly::Rational;
using poly::RPoly;

class Parser {
 public:
  Parser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  RPoly parse() {
    RPoly p = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RPoly expression() {
    RPoly acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  RPoly term() {
    RPoly acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const RPoly d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        acc *= Rational(1) / d.terms().begin()->second;
      } else {
        return acc;
      }
    }
  }

  RPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    RPoly base = primary();
    if (accept('^')) {
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      const int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
      if (e > 64) fail("exponent too large");
      RPoly out = RPoly::constant(n_, Rational(1));
      for (int k = 0; k < e; ++k) out = out * base;
      return out;
    }
    return base;
  }

  RPoly primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      RPoly inner = expression();
      if (!accept(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return RPoly::constant(n_, number());
    if (std::isalpha(static_cast<unsigned char>(c))) return RPoly::variable(n_, variable());
    fail("unexpected character");
  }

  Rational number() {
    Rational value(0);
    bool any = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_++] - '0');
      any = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      Rational scale(1, 10);
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value += scale * (text_[pos_++] - '0');
        scale /= 10;
        any = true;
      }
    }
    if (!any) fail("malformed number");
    return value;
  }

  std::size_t variable() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    static constexpr std::string_view short_names = "xyzw";
    if (name.size() == 1 && n_ <= short_names.size()) {
      const auto k = short_names.find(name[0]);
      if (k != std::string_view::npos && k < n_) return k;
    }
    if (name.size() > 1 && name.size() < 6 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const auto k = std::stoul(name.substr(1));
      if (k < n_) return k;
    }
    pos_ = start;
    fail("unknown variable '" + name + "'");
  }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace

poly::RPoly parse_polynomial(std::string_view text, std::size_t n_vars) {
  if (n_vars == 0) throw ExpressionError("polynomials need at least one variable");
  return Parser(text, n_vars).parse();
}

}  // namespace pb::cli
