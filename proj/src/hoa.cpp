#include "acql/hoa.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace acql {

namespace {

void emit_guard(const Formula& g, const PropTable& props, int parent_level, std::string& out) {
  // levels: | = 0, & = 1, unary = 2
  switch (g.op()) {
    case Op::True:
      out += 't';
      break;
    case Op::False:
      out += 'f';
      break;
    case Op::Atom:
      out += std::to_string(g.prop());
      break;
    case Op::Not:
      out += '!';
      emit_guard(g.child(), props, 2, out);
      break;
    case Op::And: {
      const bool parens = parent_level > 1;
      if (parens) out += '(';
      emit_guard(g.left(), props, 1, out);
      out += '&';
      emit_guard(g.right(), props, 1, out);
      if (parens) out += ')';
      break;
    }
    case Op::Or: {
      const bool parens = parent_level > 0;
      if (parens) out += '(';
      emit_guard(g.left(), props, 0, out);
      out += '|';
      emit_guard(g.right(), props, 0, out);
      if (parens) out += ')';
      break;
    }
    default:
      throw HoaError("temporal operator in transition guard");
  }
}

struct HoaParser {
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size()) {
      const char c = text[pos];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else if (c == '/' && pos + 1 < text.size() && text[pos + 1] == '*') {
        const size_t end = text.find("*/", pos + 2);
        if (end == std::string::npos) throw HoaError("unterminated comment");
        pos = end + 2;
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  // Tokens: identifiers (may end with ':'), integers, quoted strings,
  // punctuation, and the --XXX-- markers.
  std::string next_token() {
    skip_ws();
    if (pos >= text.size()) throw HoaError("unexpected end of input");
    const char c = text[pos];
    if (c == '"') {
      std::string s;
      ++pos;
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
        s += text[pos++];
      }
      if (pos >= text.size()) throw HoaError("unterminated string");
      ++pos;
      return "\"" + s;
    }
    if (c == '-' && text.compare(pos, 2, "--") == 0) {
      const size_t end = text.find("--", pos + 2);
      if (end == std::string::npos) throw HoaError("unterminated marker");
      std::string tok = text.substr(pos, end + 2 - pos);
      pos = end + 2;
      return tok;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string s;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
              text[pos] == '-')) {
        s += text[pos++];
      }
      if (pos < text.size() && text[pos] == ':') {
        s += text[pos++];
      }
      return s;
    }
    ++pos;
    return std::string(1, c);
  }

  std::string peek_token() {
    const size_t save = pos;
    std::string tok = eof() ? std::string() : next_token();
    pos = save;
    return tok;
  }

  int next_int() {
    const std::string tok = next_token();
    try {
      size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw HoaError("expected integer, got '" + tok + "'");
    }
  }

  // Label expressions between [ and ].
  Formula parse_label(const std::vector<int>& ap_map) {
    Formula f = parse_label_or(ap_map);
    if (peek() != ']') throw HoaError("expected ']' in label");
    ++pos;
    return f;
  }

  Formula parse_label_or(const std::vector<int>& ap_map) {
    Formula f = parse_label_and(ap_map);
    while (peek() == '|') {
      ++pos;
      f = Formula::disj(f, parse_label_and(ap_map));
    }
    return f;
  }

  Formula parse_label_and(const std::vector<int>& ap_map) {
    Formula f = parse_label_unary(ap_map);
    while (peek() == '&') {
      ++pos;
      f = Formula::conj(f, parse_label_unary(ap_map));
    }
    return f;
  }

  Formula parse_label_unary(const std::vector<int>& ap_map) {
    skip_ws();
    if (pos >= text.size()) throw HoaError("unterminated label");
    const char c = text[pos];
    if (c == '!') {
      ++pos;
      return Formula::negation(parse_label_unary(ap_map));
    }
    if (c == '(') {
      ++pos;
      Formula f = parse_label_or(ap_map);
      if (peek() != ')') throw HoaError("expected ')' in label");
      ++pos;
      return f;
    }
    if (c == 't' && !std::isalnum(static_cast<unsigned char>(pos + 1 < text.size() ? text[pos + 1] : ' '))) {
      ++pos;
      return Formula::tt();
    }
    if (c == 'f' && !std::isalnum(static_cast<unsigned char>(pos + 1 < text.size() ? text[pos + 1] : ' '))) {
      ++pos;
      return Formula::ff();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      int v = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos++] - '0');
      }
      if (v < 0 || v >= static_cast<int>(ap_map.size())) {
        throw HoaError("AP index " + std::to_string(v) + " out of range");
      }
      return Formula::atom(ap_map[static_cast<size_t>(v)]);
    }
    throw HoaError(std::string("unexpected character '") + c + "' in label");
  }
};

}  // namespace

std::string emit_hoa(const Dba& a, const PropTable& props) {
  std::ostringstream out;
  out << "HOA: v1\n";
  out << "States: " << a.num_states << "\n";
  out << "Start: " << a.initial << "\n";
  out << "AP: " << props.size();
  for (const AtomicProp& p : props.all()) out << " \"" << p.id << "\"";
  out << "\n";
  out << "acc-name: Buchi\n";
  out << "Acceptance: 1 Inf(0)\n";
  out << "properties: trans-labels explicit-labels state-acc deterministic complete\n";
  out << "--BODY--\n";
  for (int q = 0; q < a.num_states; ++q) {
    out << "State: " << q;
    if (a.is_accepting(q)) out << " {0}";
    out << "\n";
    for (const DbaEdge& e : a.edges[static_cast<size_t>(q)]) {
      std::string guard;
      emit_guard(e.guard, props, 0, guard);
      out << "[" << guard << "] " << e.target << "\n";
    }
  }
  out << "--END--\n";
  return out.str();
}

Dba parse_hoa(const std::string& text, const PropTable& props) {
  HoaParser p{text};
  if (p.next_token() != "HOA:") throw HoaError("missing HOA: header");
  if (p.next_token() != "v1") throw HoaError("unsupported HOA version");

  int num_states = -1;
  int start = -1;
  bool start_seen = false;
  std::vector<int> ap_map;
  bool ap_seen = false;
  bool acceptance_ok = false;

  while (true) {
    const std::string tok = p.next_token();
    if (tok == "--BODY--") break;
    if (tok == "States:") {
      num_states = p.next_int();
    } else if (tok == "Start:") {
      if (start_seen) throw HoaError("multiple start states: automaton is nondeterministic");
      start = p.next_int();
      start_seen = true;
      if (!p.eof() && p.peek_token() == "&") {
        throw HoaError("conjunct start states are not supported");
      }
    } else if (tok == "AP:") {
      const int n = p.next_int();
      for (int i = 0; i < n; ++i) {
        const std::string name_tok = p.next_token();
        if (name_tok.empty() || name_tok[0] != '"') throw HoaError("AP names must be quoted");
        const std::string name = name_tok.substr(1);
        const int idx = props.find(name);
        if (idx < 0) throw HoaError("unknown atomic proposition \"" + name + "\"");
        ap_map.push_back(idx);
      }
      ap_seen = true;
    } else if (tok == "Acceptance:") {
      const int sets = p.next_int();
      std::string rest;
      while (!p.eof()) {
        const std::string t = p.peek_token();
        if (!t.empty() && (t == "--BODY--" || t.back() == ':')) break;
        rest += p.next_token();
      }
      if (sets != 1 || rest != "Inf(0)") {
        throw HoaError("unsupported acceptance condition '" + std::to_string(sets) + " " + rest +
                       "' (need Buchi: 1 Inf(0))");
      }
      acceptance_ok = true;
    } else if (tok == "acc-name:") {
      const std::string name = p.next_token();
      if (name != "Buchi") throw HoaError("unsupported acc-name '" + name + "'");
    } else if (tok == "name:" || tok == "tool:") {
      p.next_token();
    } else if (tok == "properties:") {
      while (!p.eof()) {
        const std::string t = p.peek_token();
        if (t == "--BODY--" || (!t.empty() && t.back() == ':')) break;
        p.next_token();
      }
    } else if (!tok.empty() && tok.back() == ':') {
      // Unknown header item: skip its value tokens.
      while (!p.eof()) {
        const std::string t = p.peek_token();
        if (t == "--BODY--" || (!t.empty() && t.back() == ':')) break;
        p.next_token();
      }
    } else {
      throw HoaError("unexpected token '" + tok + "' in header");
    }
  }

  if (num_states < 0) throw HoaError("missing States: header");
  if (!start_seen) throw HoaError("missing Start: header");
  if (!ap_seen) throw HoaError("missing AP: header");
  if (!acceptance_ok) throw HoaError("missing Acceptance: header");
  if (start < 0 || start >= num_states) throw HoaError("start state out of range");

  Dba a;
  a.num_states = num_states;
  a.initial = start;
  a.edges.resize(static_cast<size_t>(num_states));
  a.accepting.assign(static_cast<size_t>(num_states), false);

  std::vector<bool> seen_state(static_cast<size_t>(num_states), false);
  int current = -1;
  while (true) {
    if (p.eof()) throw HoaError("missing --END-- marker");
    if (p.peek() == '[') {
      if (current < 0) throw HoaError("edge before any State: line");
      ++p.pos;  // consume '['
      Formula guard = p.parse_label(ap_map);
      const int target = p.next_int();
      if (target < 0 || target >= num_states) throw HoaError("edge target out of range");
      if (!p.eof() && p.peek() == '{') {
        throw HoaError("transition-based acceptance is not supported");
      }
      a.edges[static_cast<size_t>(current)].push_back({guard, target});
      continue;
    }
    const std::string tok = p.next_token();
    if (tok == "--END--") break;
    if (tok == "State:") {
      current = p.next_int();
      if (current < 0 || current >= num_states) throw HoaError("state index out of range");
      if (seen_state[static_cast<size_t>(current)]) {
        throw HoaError("duplicate State: section for " + std::to_string(current));
      }
      seen_state[static_cast<size_t>(current)] = true;
      if (!p.eof() && p.peek() == '"') p.next_token();  // optional state name
      if (!p.eof() && p.peek() == '{') {
        ++p.pos;
        while (p.peek() != '}') {
          const int set = p.next_int();
          if (set != 0) throw HoaError("acceptance set " + std::to_string(set) + " out of range");
          a.accepting[static_cast<size_t>(current)] = true;
        }
        ++p.pos;
      }
    } else {
      throw HoaError("unexpected token '" + tok + "' in body");
    }
  }

  for (int q = 0; q < num_states; ++q) {
    if (!seen_state[static_cast<size_t>(q)]) {
      throw HoaError("state " + std::to_string(q) + " has no State: section");
    }
  }

  // DBA contract: deterministic and complete over the declared APs.
  if (props.size() > 16) throw HoaError("cannot verify determinism beyond 16 propositions");
  const ValidationReport report = validate(a, props);
  if (!report.ok()) {
    throw HoaError("automaton violates the DBA contract: " +
                   report.issues.front().describe(props));
  }
  return a;
}

}  // namespace acql
