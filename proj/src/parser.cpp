#include "acql/parser.hpp"

#include <cctype>

namespace acql {

namespace {

struct Parser {
  const std::string& text;
  const PropTable& props;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  // Reads an identifier without consuming it; empty if none.
  std::string peek_ident() {
    skip_ws();
    size_t p = pos;
    std::string s;
    while (p < text.size() && ident_char(text[p])) s += text[p++];
    return s;
  }

  void consume_ident(const std::string& s) { pos += s.size(); }

  Formula parse_or() {
    Formula f = parse_and();
    while (peek() == '|') {
      ++pos;
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (peek() == '&') {
      ++pos;
      f = Formula::conj(f, parse_until());
    }
    return f;
  }

  Formula parse_until() {
    Formula f = parse_unary();
    if (peek_ident() == "U") {
      consume_ident("U");
      // right associative: a U b U c == a U (b U c)
      return Formula::until(f, parse_until());
    }
    return f;
  }

  Formula parse_unary() {
    skip_ws();
    if (pos < text.size() && text[pos] == '!') {
      ++pos;
      return Formula::negation(parse_unary());
    }
    const std::string id = peek_ident();
    if (id == "F") {
      consume_ident(id);
      return Formula::eventually(parse_unary());
    }
    if (id == "G") {
      consume_ident(id);
      return Formula::always(parse_unary());
    }
    if (id == "X") {
      consume_ident(id);
      return Formula::next(parse_unary());
    }
    return parse_primary();
  }

  Formula parse_primary() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("expected formula", pos);
    if (text[pos] == '(') {
      const size_t open = pos;
      ++pos;
      Formula f = parse_or();
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') {
        throw ParseError("unbalanced parenthesis opened", open);
      }
      ++pos;
      return f;
    }
    const std::string id = peek_ident();
    if (id.empty()) throw ParseError(std::string("unexpected character '") + text[pos] + "'", pos);
    if (id == "true") {
      consume_ident(id);
      return Formula::tt();
    }
    if (id == "false") {
      consume_ident(id);
      return Formula::ff();
    }
    if (id == "U" || id == "F" || id == "G" || id == "X") {
      throw ParseError("operator '" + id + "' needs an operand", pos);
    }
    const int prop = props.find(id);
    if (prop < 0) throw ParseError("unknown proposition '" + id + "'", pos);
    consume_ident(id);
    return Formula::atom(prop);
  }
};

}  // namespace

Formula parse_formula(const std::string& text, const PropTable& props) {
  Parser p{text, props};
  Formula f = p.parse_or();
  if (!p.at_end()) {
    throw ParseError(std::string("trailing input '") + text[p.pos] + "'", p.pos);
  }
  return f;
}

}  // namespace acql
