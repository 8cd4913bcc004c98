// The .horn text format: parser, printer and JSON export.
#pragma once

#include <cctype>
#include <cstring>
#include <sstream>

#include "core.hpp"
#include "json.hpp"

namespace hornlab {

struct ParseResult {
  std::optional<Formula> formula;
  std::vector<Diagnostic> diags;
  bool ok() const { return formula.has_value(); }
  std::string message() const {
    std::string s;
    for (auto& d : diags) {
      if (!d.error) continue;
      s += std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " + d.message + "\n";
    }
    return s;
  }
};

namespace detail {

inline bool reserved_char(unsigned char c) {
  return std::isspace(c) || c == '(' || c == ')' || c == '&' || c == ',' || c == '~' || c == '<' ||
         c == '=' || c == '>' || c == '+' || c == '-' || c == '#' || c == '!';
}

// Rewrites the unicode operator spellings to ASCII, keeping a map from the
// rewritten column back to the original byte column.
inline std::string ascii_ops(const std::string& line, std::vector<int>& colmap) {
  static const std::pair<const char*, const char*> subs[] = {
      {"\xE2\x88\xA7", "&"},  {"\xE2\x86\x92", "->"}, {"\xC2\xAC", "~"},
      {"\xE2\x89\xA4", "<="}, {"\xE2\x89\xA5", ">="}, {"\xE2\x8A\xA5", "FALSE"}};
  std::string out;
  colmap.clear();
  size_t i = 0;
  while (i < line.size()) {
    bool done = false;
    for (auto& [from, to] : subs) {
      size_t len = std::strlen(from);
      if (line.compare(i, len, from) == 0) {
        for (size_t k = 0; k < std::strlen(to); ++k) colmap.push_back(int(i));
        out += to;
        i += len;
        done = true;
        break;
      }
    }
    if (!done) {
      colmap.push_back(int(i));
      out += line[i++];
    }
  }
  colmap.push_back(int(line.size()));
  return out;
}

struct LineLexer {
  const std::string& s;
  size_t pos = 0;
  std::string err;
  size_t err_pos = 0;

  explicit LineLexer(const std::string& str, size_t start = 0) : s(str), pos(start) {}

  void ws() {
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
  }
  bool eof() {
    ws();
    return pos >= s.size();
  }
  bool peek(const char* t) {
    ws();
    return s.compare(pos, std::strlen(t), t) == 0;
  }
  bool eat(const char* t) {
    if (!peek(t)) return false;
    pos += std::strlen(t);
    return true;
  }
  bool fail(const std::string& m, size_t at) {
    if (err.empty()) {
      err = m;
      err_pos = at;
    }
    return false;
  }
  std::string ident() {
    ws();
    size_t b = pos;
    int depth = 0;  // generated names keep operators inside braces
    while (pos < s.size() && (depth > 0 || !reserved_char((unsigned char)s[pos]))) {
      if (s[pos] == '{') ++depth;
      if (s[pos] == '}' && depth > 0) --depth;
      ++pos;
    }
    return s.substr(b, pos - b);
  }
  bool integer(int& v) {
    ws();
    size_t b = pos;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
    if (b == pos || pos - b > 6) {
      pos = b;
      return false;
    }
    v = std::stoi(s.substr(b, pos - b));
    return true;
  }
  // var [(+|-) int]
  bool term(Term& t) {
    ws();
    size_t at = pos;
    std::string id = ident();
    if (id != "x" && id != "y") return fail("expected x or y", at);
    t.var = id == "x" ? Var::X : Var::Y;
    t.offset = 0;
    if (peek("+") || (peek("-") && !peek("->"))) {
      bool neg = s[pos] == '-';
      ++pos;
      int k;
      if (!integer(k)) return fail("expected an integer offset", pos);
      t.offset = neg ? -k : k;
    }
    return true;
  }
};

inline Cmp flip(Cmp op) {
  switch (op) {
    case Cmp::LT: return Cmp::GT;
    case Cmp::LE: return Cmp::GE;
    case Cmp::GT: return Cmp::LT;
    case Cmp::GE: return Cmp::LE;
    default: return op;
  }
}

inline bool read_cmp(LineLexer& lx, Cmp& op) {
  if (lx.eat("<=")) op = Cmp::LE;
  else if (lx.eat(">=")) op = Cmp::GE;
  else if (lx.eat("<")) op = Cmp::LT;
  else if (lx.eat(">")) op = Cmp::GT;
  else if (lx.eat("=")) op = Cmp::EQ;
  else return false;
  return true;
}

inline bool is_reserved_name(const std::string& s) {
  return s == "x" || s == "y" || s == "n" || s == "min" || s == "max" || s == "FALSE" || s == "false";
}

}  // namespace detail

inline ParseResult parse_formula(const std::string& text, const ValidateOptions& vopt = {}, bool run_validate = true) {
  using namespace detail;
  ParseResult res;
  Formula f;
  bool have_logic = false, have_alpha = false;
  std::string bottom_name;
  SourceSpan bottom_span;
  auto error = [&](int line, int col, int len, const std::string& msg) {
    Diagnostic d;
    d.rule = "syntax";
    d.message = msg;
    d.span = {line, col, std::max(len, 1)};
    res.diags.push_back(d);
  };

  struct RawClause {
    int line;
    std::string text;
    std::vector<int> colmap;
    size_t arrow;
  };
  std::vector<RawClause> raw;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::vector<int> colmap;
    std::string l = ascii_ops(line, colmap);
    size_t b = l.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::istringstream ws(l);
    std::string kw;
    ws >> kw;
    if (kw == "logic") {
      std::string v;
      ws >> v;
      if (v == "pred") f.logic = Logic::PRED;
      else if (v == "pred-dio") f.logic = Logic::PRED_DIO;
      else if (v == "incl") f.logic = Logic::INCL;
      else {
        error(lineno, int(b) + 7, int(v.size()), "unknown logic '" + v + "'");
        continue;
      }
      have_logic = true;
    } else if (kw == "alphabet") {
      std::string a;
      while (ws >> a) {
        bool bad = !is_single_grapheme(a) || std::isdigit((unsigned char)a[0]);
        for (unsigned char c : a)
          if (c < 0x80 && reserved_char(c)) bad = true;
        if (bad) {
          error(lineno, int(b) + 1, int(l.size() - b), "letter '" + a + "' must be one grapheme and not an operator or digit");
          continue;
        }
        if (std::find(f.alphabet.begin(), f.alphabet.end(), a) != f.alphabet.end()) {
          error(lineno, int(b) + 1, int(l.size() - b), "duplicate letter '" + a + "'");
          continue;
        }
        f.alphabet.push_back(a);
      }
      have_alpha = true;
    } else if (kw == "predicates") {
      std::string p;
      while (ws >> p) {
        if (is_reserved_name(p)) error(lineno, int(b) + 1, int(p.size()), "reserved predicate name '" + p + "'");
        else f.add_pred(p);
      }
    } else if (kw == "false" && l.find("->") == std::string::npos) {
      ws >> bottom_name;
      bottom_span = {lineno, int(b) + 1, int(l.size() - b)};
    } else {
      size_t arrow = l.find("->");
      if (arrow == std::string::npos) {
        error(lineno, colmap[b] + 1, int(l.size() - b), "expected '->' in clause");
        continue;
      }
      raw.push_back({lineno, l, colmap, arrow});
    }
  }
  if (!have_logic) error(1, 1, 1, "missing 'logic' header");
  if (!have_alpha) error(1, 1, 1, "missing 'alphabet' header");

  // conclusions declare predicates in order of first use
  std::vector<std::optional<std::pair<bool, std::string>>> heads(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    auto& r = raw[i];
    LineLexer lx(r.text, r.arrow + 2);
    size_t at = (lx.ws(), lx.pos);
    std::string id = lx.ident();
    auto col = [&](size_t p) { return r.colmap[std::min(p, r.colmap.size() - 1)] + 1; };
    if (id == "FALSE" || id == "false") {
      if (!lx.eof()) {
        error(r.line, col(lx.pos), 1, "unexpected text after FALSE");
        continue;
      }
      heads[i] = {{true, ""}};
      continue;
    }
    if (id.empty() || is_reserved_name(id)) {
      error(r.line, col(at), std::max<int>(1, int(id.size())), "expected a conclusion atom or FALSE");
      continue;
    }
    Term t1, t2;
    if (!lx.eat("(") || !lx.term(t1) || !lx.eat(",") || !lx.term(t2) || !lx.eat(")")) {
      error(r.line, col(lx.err.empty() ? lx.pos : lx.err_pos), 1,
            lx.err.empty() ? "malformed conclusion, expected Name(x,y)" : lx.err);
      continue;
    }
    if (!(t1 == tx() && t2 == ty())) {
      error(r.line, col(at), int(id.size()), "conclusion arguments must be exactly (x,y)");
      continue;
    }
    if (!lx.eof()) {
      error(r.line, col(lx.pos), 1, "unexpected text after the conclusion");
      continue;
    }
    heads[i] = {{false, id}};
    f.add_pred(id);
  }
  if (!bottom_name.empty()) {
    int p = f.pred_index(bottom_name);
    if (p < 0) p = f.add_pred(bottom_name);
    f.bottom = p;
  }

  for (size_t i = 0; i < raw.size(); ++i) {
    if (!heads[i]) continue;
    auto& r = raw[i];
    auto col = [&](size_t p) { return r.colmap[std::min(p, r.colmap.size() - 1)] + 1; };
    std::string body = r.text.substr(0, r.arrow);
    LineLexer lx(body);
    Clause c;
    c.is_false = heads[i]->first;
    if (!c.is_false) c.head = f.pred_index(heads[i]->second);
    c.span = {r.line, col(body.find_first_not_of(" \t") == std::string::npos ? 0 : body.find_first_not_of(" \t")),
              int(r.text.size())};
    bool bad = false;
    if (!lx.eof()) {
      while (true) {
        lx.ws();
        size_t at = lx.pos;
        bool neg = lx.eat("~") || lx.eat("!");
        lx.ws();
        size_t id_at = lx.pos;
        std::string id = lx.ident();
        if (id.empty()) {
          error(r.line, col(id_at), 1, "expected a literal");
          bad = true;
          break;
        }
        if ((id == "x" || id == "y") && !lx.peek("(")) {
          // comparison
          if (neg) {
            error(r.line, col(at), 1, "negation is not allowed on comparisons");
            bad = true;
            break;
          }
          lx.pos = id_at;
          Term lhs;
          lx.term(lhs);
          Cmp op;
          if (!read_cmp(lx, op)) {
            error(r.line, col(lx.pos), 1, "expected a comparison operator");
            bad = true;
            break;
          }
          lx.ws();
          size_t rhs_at = lx.pos;
          int k;
          if (lx.integer(k)) {
            if (lhs.offset != 0) {
              error(r.line, col(id_at), int(rhs_at - id_at), "constant comparisons take a bare variable");
              bad = true;
              break;
            }
            c.hyps.push_back(ArithAtom{ArithAtom::Kind::Start, op, lhs.var, k});
          } else {
            std::string rid = lx.ident();
            if (rid == "n") {
              int b = 0;
              if (lx.eat("-")) {
                if (!lx.integer(b)) {
                  error(r.line, col(lx.pos), 1, "expected an integer after n-");
                  bad = true;
                  break;
                }
              }
              if (lhs.offset != 0) {
                error(r.line, col(id_at), int(lx.pos - id_at), "constant comparisons take a bare variable");
                bad = true;
                break;
              }
              c.hyps.push_back(ArithAtom{ArithAtom::Kind::End, op, lhs.var, b});
            } else {
              lx.pos = rhs_at;
              Term rhs;
              if (!lx.term(rhs)) {
                error(r.line, col(rhs_at), 1, "expected x, y, an integer or n-k");
                bad = true;
                break;
              }
              if (rhs.var == lhs.var) {
                error(r.line, col(id_at), int(lx.pos - id_at), "comparison must relate x and y");
                bad = true;
                break;
              }
              if (lhs.var == Var::X) c.hyps.push_back(rel(op, lhs.offset - rhs.offset));
              else c.hyps.push_back(rel(flip(op), rhs.offset - lhs.offset));
            }
          }
        } else {
          size_t paren = lx.pos;
          if (!lx.eat("(")) {
            error(r.line, col(paren), 1, "expected '(' after '" + id + "'");
            bad = true;
            break;
          }
          Term t1, t2;
          bool two = false;
          if (!lx.term(t1)) {
            error(r.line, col(lx.err_pos), 1, lx.err);
            bad = true;
            break;
          }
          if (lx.eat(",")) {
            two = true;
            if (!lx.term(t2)) {
              error(r.line, col(lx.err_pos), 1, lx.err);
              bad = true;
              break;
            }
          }
          if (!lx.eat(")")) {
            error(r.line, col(paren), 1, "unmatched parenthesis");
            bad = true;
            break;
          }
          if (two) {
            if (neg) {
              error(r.line, col(at), 1, "negation is not allowed on computation atoms");
              bad = true;
              break;
            }
            int p = f.pred_index(id);
            if (p < 0) {
              error(r.line, col(id_at), int(id.size()), "unknown predicate '" + id + "'");
              bad = true;
              break;
            }
            c.hyps.push_back(CompAtom{p, t1, t2});
          } else if (id == "min" || id == "max") {
            c.hyps.push_back(InputLiteral{id == "min" ? InKind::MIN : InKind::MAX, -1, !neg, t1});
          } else if (id[0] == 'Q') {
            std::string letter = id.substr(id.size() > 2 && id[1] == '_' ? 2 : 1);
            auto it = std::find(f.alphabet.begin(), f.alphabet.end(), letter);
            if (it == f.alphabet.end() && letter.size() > 1 && letter[0] == '_')
              it = std::find(f.alphabet.begin(), f.alphabet.end(), letter.substr(1));
            if (it == f.alphabet.end()) {
              error(r.line, col(id_at), int(id.size()), "unknown input letter in '" + id + "'");
              bad = true;
              break;
            }
            if (neg) {
              error(r.line, col(at), 1, "negation over an input letter predicate");
              bad = true;
              break;
            }
            c.hyps.push_back(InputLiteral{InKind::Q, int(it - f.alphabet.begin()), true, t1});
          } else {
            error(r.line, col(id_at), int(id.size()), "unknown unary predicate '" + id + "'");
            bad = true;
            break;
          }
        }
        if (lx.eof()) break;
        if (!lx.eat("&")) {
          error(r.line, col(lx.pos), 1, "expected '&' between hypotheses");
          bad = true;
          break;
        }
      }
    }
    if (!bad) f.clauses.push_back(std::move(c));
  }

  bool any_error = false;
  for (auto& d : res.diags) any_error |= d.error;
  if (any_error) return res;
  if (run_validate) {
    auto rep = validate(f, vopt);
    for (auto& d : rep.diags) res.diags.push_back(d);
    if (!rep.ok()) return res;
  }
  res.formula = std::move(f);
  return res;
}

inline Formula parse_formula_or_throw(const std::string& text, const ValidateOptions& vopt = {}) {
  auto r = parse_formula(text, vopt);
  if (!r.ok()) throw Error(r.message());
  return *r.formula;
}

// ---- printing ----

inline std::string term_string(const Term& t) {
  std::string s = var_name(t.var);
  if (t.offset > 0) s += "+" + std::to_string(t.offset);
  if (t.offset < 0) s += "-" + std::to_string(-t.offset);
  return s;
}

inline const char* cmp_string(Cmp op) {
  switch (op) {
    case Cmp::EQ: return "=";
    case Cmp::LT: return "<";
    case Cmp::LE: return "<=";
    case Cmp::GT: return ">";
    case Cmp::GE: return ">=";
  }
  return "?";
}

inline std::string hyp_string(const Formula& f, const Hyp& h) {
  if (auto l = as<InputLiteral>(h)) {
    std::string s = l->positive ? "" : "~";
    if (l->kind == InKind::Q) s += "Q" + f.alphabet[l->letter];
    else s += l->kind == InKind::MIN ? "min" : "max";
    return s + "(" + term_string(l->term) + ")";
  }
  if (auto a = as<ArithAtom>(h)) {
    switch (a->kind) {
      case ArithAtom::Kind::Rel: return term_string(tx(a->k)) + cmp_string(a->op) + "y";
      case ArithAtom::Kind::Start: return std::string(var_name(a->var)) + cmp_string(a->op) + std::to_string(a->k);
      case ArithAtom::Kind::End:
        return std::string(var_name(a->var)) + cmp_string(a->op) + "n" + (a->k ? "-" + std::to_string(a->k) : "");
    }
  }
  auto p = as<CompAtom>(h);
  return f.preds[p->pred] + "(" + term_string(p->a1) + "," + term_string(p->a2) + ")";
}

inline std::string clause_string(const Formula& f, const Clause& c) {
  std::string s;
  for (size_t i = 0; i < c.hyps.size(); ++i) {
    if (i) s += " & ";
    s += hyp_string(f, c.hyps[i]);
  }
  s += s.empty() ? "-> " : " -> ";
  s += c.is_false ? "FALSE" : f.preds[c.head] + "(x,y)";
  return s;
}

inline std::string print_formula(const Formula& f) {
  std::string s = std::string("logic ") + logic_name(f.logic) + "\nalphabet";
  for (auto& a : f.alphabet) s += " " + a;
  s += "\n";
  if (!f.preds.empty()) {
    s += "predicates";
    for (auto& p : f.preds) s += " " + p;
    s += "\n";
  }
  if (f.bottom) s += "false " + f.preds[*f.bottom] + "\n";
  for (auto& c : f.clauses) s += clause_string(f, c) + "\n";
  return s;
}

// ---- JSON ----

inline nlohmann::json term_json(const Term& t) { return {{"var", var_name(t.var)}, {"offset", t.offset}}; }

inline nlohmann::json formula_json(const Formula& f) {
  using nlohmann::json;
  json j;
  j["logic"] = logic_name(f.logic);
  j["alphabet"] = f.alphabet;
  j["predicates"] = f.preds;
  j["bottom"] = f.bottom ? json(f.preds[*f.bottom]) : json(nullptr);
  json cl = json::array();
  for (auto& c : f.clauses) {
    json hs = json::array();
    for (auto& h : c.hyps) {
      if (auto l = as<InputLiteral>(h)) {
        json o{{"type", "input"},
               {"pred", l->kind == InKind::Q ? "Q" : l->kind == InKind::MIN ? "min" : "max"},
               {"positive", l->positive},
               {"term", term_json(l->term)}};
        if (l->kind == InKind::Q) o["letter"] = f.alphabet[l->letter];
        hs.push_back(o);
      } else if (auto a = as<ArithAtom>(h)) {
        const char* kind = a->kind == ArithAtom::Kind::Rel ? "rel" : a->kind == ArithAtom::Kind::Start ? "start" : "end";
        hs.push_back({{"type", "arith"}, {"kind", kind}, {"op", cmp_string(a->op)}, {"var", var_name(a->var)}, {"k", a->k}});
      } else if (auto p = as<CompAtom>(h)) {
        hs.push_back({{"type", "atom"}, {"pred", f.preds[p->pred]}, {"args", {term_json(p->a1), term_json(p->a2)}}});
      }
    }
    cl.push_back({{"hyps", hs}, {"head", c.is_false ? json(nullptr) : json(f.preds[c.head])}, {"text", clause_string(f, c)}});
  }
  j["clauses"] = cl;
  return j;
}

}  // namespace hornlab
