#include "swsym/parse.hpp"

#include <cctype>
#include <cstdlib>

namespace swsym {

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  explicit Parser(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "' at position " + std::to_string(pos) +
                       " in \"" + text + "\"");
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError(what + " at position " + std::to_string(pos) + " in \"" + text + "\"");
  }

  Expr parse() {
    Expr e = expr();
    if (!eof()) fail("trailing input");
    return e;
  }

  Expr expr() {
    bool neg = false;
    if (accept('-'))
      neg = true;
    else
      accept('+');
    Expr acc = term();
    if (neg) acc = -acc;
    while (true) {
      if (accept('+'))
        acc += term();
      else if (accept('-'))
        acc -= term();
      else
        break;
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (true) {
      if (accept('*'))
        acc *= factor();
      else if (accept('/'))
        acc /= factor();
      else
        break;
    }
    return acc;
  }

  Expr factor() {
    Expr base = primary();
    if (accept('^')) {
      skip_ws();
      bool neg = accept('-');
      skip_ws();
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        throw UnsupportedFormError("exponent must be an integer in \"" + text + "\"");
      long k = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        k = k * 10 + (text[pos] - '0');
        ++pos;
      }
      if (pos < text.size() && text[pos] == '.')
        throw UnsupportedFormError("exponent must be an integer in \"" + text + "\"");
      base = base.pow(static_cast<int>(neg ? -k : k));
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long n = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        n = n * 10 + (text[pos] - '0');
        ++pos;
      }
      if (pos < text.size() && text[pos] == '.') fail("decimal literals are not supported");
      return Expr(n);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        name += text[pos];
        ++pos;
      }
      if (name == "sin" || name == "cos" || name == "sinh" || name == "cosh" || name == "exp") {
        skip_ws();
        if (pos < text.size() && text[pos] == '(') {
          ++pos;
          Expr arg = expr();
          expect(')');
          FunKind f = name == "sin"    ? FunKind::sin
                      : name == "cos"  ? FunKind::cos
                      : name == "sinh" ? FunKind::sinh
                      : name == "cosh" ? FunKind::cosh
                                       : FunKind::exp;
          return Expr::fun(f, arg);
        }
        fail("function name '" + name + "' must be followed by '('");
      }
      return resolve(name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  static bool is_dependent(char c) {
    return c == 'u' || c == 'v' || c == 'h' || c == 'H' || c == 'U' || c == 'V';
  }

  static bool is_coordinate(char c) { return c == 't' || c == 'x' || c == 'y' || c == 'w'; }

  static Expr resolve(const std::string& name) {
    if (name.size() == 1) {
      if (is_coordinate(name[0])) return Expr::coordinate(name[0]);
      if (is_dependent(name[0])) return Expr::dependent(name[0]);
    }
    if (name == "H0" || name == "U0" || name == "V0") return Expr::integration_constant(name);
    if (name.size() >= 3 && is_dependent(name[0]) && name[1] == '_') {
      bool all_coords = true;
      for (std::size_t i = 2; i < name.size(); ++i)
        if (!is_coordinate(name[i])) all_coords = false;
      if (all_coords) return Expr::jet(name[0], name.substr(2));
    }
    return Expr::parameter(name);
  }
};

}  // namespace

Expr parse_expr(const std::string& text) {
  Parser p(text);
  return p.parse();
}

}  // namespace swsym
