// Abstract syntax for the three Horn fragments, fragment validation and
// desugaring of the constant comparisons.
#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hornlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Var : uint8_t { X, Y };
inline Var other(Var v) { return v == Var::X ? Var::Y : Var::X; }
inline const char* var_name(Var v) { return v == Var::X ? "x" : "y"; }

struct Term {
  Var var = Var::X;
  int offset = 0;
  bool operator==(const Term&) const = default;
  auto operator<=>(const Term&) const = default;
};

enum class Logic : uint8_t { PRED, PRED_DIO, INCL };

inline const char* logic_name(Logic l) {
  switch (l) {
    case Logic::PRED: return "pred";
    case Logic::PRED_DIO: return "pred-dio";
    case Logic::INCL: return "incl";
  }
  return "?";
}

struct SourceSpan {
  int line = 0, column = 0, length = 0;
  bool operator==(const SourceSpan&) const = default;
};

enum class InKind : uint8_t { Q, MIN, MAX };

struct InputLiteral {
  InKind kind = InKind::MIN;
  int letter = -1;  // only for Q
  bool positive = true;
  Term term;
  bool operator==(const InputLiteral&) const = default;
  auto operator<=>(const InputLiteral&) const = default;
};

enum class Cmp : uint8_t { EQ, LT, LE, GT, GE };

// Rel:   x + k  op  y
// Start: var op k
// End:   var op n-k
struct ArithAtom {
  enum class Kind : uint8_t { Rel, Start, End };
  Kind kind = Kind::Rel;
  Cmp op = Cmp::LE;
  Var var = Var::X;
  int k = 0;
  bool operator==(const ArithAtom&) const = default;
  auto operator<=>(const ArithAtom&) const = default;
};

struct CompAtom {
  int pred = 0;
  Term a1{Var::X, 0}, a2{Var::Y, 0};
  bool operator==(const CompAtom&) const = default;
  auto operator<=>(const CompAtom&) const = default;
};

using Hyp = std::variant<InputLiteral, ArithAtom, CompAtom>;

struct Clause {
  std::vector<Hyp> hyps;
  bool is_false = false;
  int head = 0;  // predicate index when !is_false
  SourceSpan span;
  bool operator==(const Clause& o) const {
    return hyps == o.hyps && is_false == o.is_false && (is_false || head == o.head);
  }
};

struct Formula {
  Logic logic = Logic::PRED;
  std::vector<std::string> alphabet;
  std::vector<std::string> preds;
  std::optional<int> bottom;  // R_bot, index 0 in normal forms
  std::vector<Clause> clauses;
  bool operator==(const Formula&) const = default;

  int pred_index(const std::string& name) const {
    for (size_t i = 0; i < preds.size(); ++i)
      if (preds[i] == name) return int(i);
    return -1;
  }
  int add_pred(const std::string& name) {
    int i = pred_index(name);
    if (i >= 0) return i;
    preds.push_back(name);
    return int(preds.size()) - 1;
  }
};

// ---- small constructors used all over the normalizers ----

inline Term tx(int off = 0) { return {Var::X, off}; }
inline Term ty(int off = 0) { return {Var::Y, off}; }
inline Hyp qlit(int letter, Term t) { return InputLiteral{InKind::Q, letter, true, t}; }
inline Hyp minlit(Term t, bool pos = true) { return InputLiteral{InKind::MIN, -1, pos, t}; }
inline Hyp maxlit(Term t, bool pos = true) { return InputLiteral{InKind::MAX, -1, pos, t}; }
inline Hyp rel(Cmp op, int k = 0) { return ArithAtom{ArithAtom::Kind::Rel, op, Var::X, k}; }
inline Hyp atom(int p, Term a1, Term a2) { return CompAtom{p, a1, a2}; }
inline Hyp atom(int p) { return CompAtom{p, tx(), ty()}; }

inline Clause make_clause(std::vector<Hyp> hyps, int head) {
  Clause c;
  c.hyps = std::move(hyps);
  c.head = head;
  return c;
}
inline Clause make_false(std::vector<Hyp> hyps) {
  Clause c;
  c.hyps = std::move(hyps);
  c.is_false = true;
  return c;
}

template <class T>
const T* as(const Hyp& h) {
  return std::get_if<T>(&h);
}

inline bool has_comp(const Clause& c) {
  for (auto& h : c.hyps)
    if (as<CompAtom>(h)) return true;
  return false;
}

// ---- UTF-8 letters ----

inline bool is_combining(uint32_t cp) {
  return (cp >= 0x300 && cp <= 0x36F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
         (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xFE20 && cp <= 0xFE2F) || cp == 0x200D ||
         (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

// Decodes one code point; returns byte length, 0 on malformed input.
inline int utf8_decode(const std::string& s, size_t i, uint32_t& cp) {
  auto b = [&](size_t k) { return (unsigned char)s[k]; };
  unsigned char c = b(i);
  int len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 0;
  if (!len || i + len > s.size()) return 0;
  cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
  for (int k = 1; k < len; ++k) {
    if ((b(i + k) >> 6) != 2) return 0;
    cp = (cp << 6) | (b(i + k) & 0x3F);
  }
  return len;
}

// Approximate extended grapheme clusters: a base code point plus trailing
// combining marks, variation selectors and ZWJ continuations.
inline std::optional<std::vector<std::string>> split_graphemes(const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  bool join_next = false;
  while (i < s.size()) {
    uint32_t cp;
    int len = utf8_decode(s, i, cp);
    if (!len) return std::nullopt;
    if (!out.empty() && (is_combining(cp) || join_next)) {
      out.back() += s.substr(i, len);
    } else {
      out.push_back(s.substr(i, len));
    }
    join_next = cp == 0x200D;
    i += len;
  }
  return out;
}

inline bool is_single_grapheme(const std::string& s) {
  auto g = split_graphemes(s);
  return g && g->size() == 1;
}

using Word = std::vector<int>;

inline Word parse_word(const std::vector<std::string>& alphabet, const std::string& text) {
  auto g = split_graphemes(text);
  if (!g) throw Error("word is not valid UTF-8");
  Word w;
  for (auto& s : *g) {
    auto it = std::find(alphabet.begin(), alphabet.end(), s);
    if (it == alphabet.end()) throw Error("letter '" + s + "' is not in the alphabet");
    w.push_back(int(it - alphabet.begin()));
  }
  return w;
}

inline std::string word_string(const std::vector<std::string>& alphabet, const Word& w) {
  std::string s;
  for (int c : w) s += alphabet[c];
  return s;
}

// All words of length 1..max_len in shortlex order.
inline std::vector<Word> shortlex_words(int sigma, int max_len) {
  std::vector<Word> out;
  for (int len = 1; len <= max_len; ++len) {
    Word w(len, 0);
    while (true) {
      out.push_back(w);
      int i = len - 1;
      while (i >= 0 && w[i] == sigma - 1) w[i--] = 0;
      if (i < 0) break;
      ++w[i];
    }
  }
  return out;
}

// ---- per-variable position constraints ----
//
// START(v) = v, END(v) = n - v. A conjunction of min/max literals and constant
// comparisons on one variable is an interval on each of the two.

constexpr int INF = INT_MAX / 4;

struct Interval {
  int lo = 0, hi = INF;
  bool empty() const { return lo > hi; }
  Interval meet(Interval o) const { return {std::max(lo, o.lo), std::min(hi, o.hi)}; }
  bool operator==(const Interval&) const = default;
  auto operator<=>(const Interval&) const = default;
};

struct VarBounds {
  Interval start{1, INF};
  Interval end{0, INF};
  bool empty() const { return start.empty() || end.empty(); }
  bool operator==(const VarBounds&) const = default;
  auto operator<=>(const VarBounds&) const = default;
};

// One literal as a disjunction of bound refinements on its variable.
// Saturation makes min(v+k), k>0, and max(v+k), k<0, mean n=1.
inline std::vector<VarBounds> literal_bounds(InKind kind, bool positive, int k) {
  VarBounds one;  // n = 1 and v = 1
  one.start = {1, 1};
  one.end = {0, 0};
  VarBounds b;
  if (kind == InKind::MIN) {
    if (k <= 0) {
      if (positive) b.start = {1, 1 - k};
      else b.start = {2 - k, INF};
      return {b};
    }
    if (positive) return {one};
    VarBounds s, e;
    s.start = {2, INF};
    e.end = {1, INF};
    return {s, e};
  }
  if (k >= 0) {
    if (positive) b.end = {0, k};
    else b.end = {k + 1, INF};
    return {b};
  }
  if (positive) return {one};
  VarBounds s, e;
  s.start = {2, INF};
  e.end = {1, INF};
  return {s, e};
}

inline VarBounds meet(const VarBounds& a, const VarBounds& b) {
  return {a.start.meet(b.start), a.end.meet(b.end)};
}

// Constant comparisons. Start: v op k. End: v op n-k.
inline VarBounds arith_bounds(const ArithAtom& a) {
  VarBounds b;
  Interval& iv = a.kind == ArithAtom::Kind::Start ? b.start : b.end;
  int k = a.k;
  // For End, v op n-k  <=>  n-v (reversed op) k
  Cmp op = a.op;
  if (a.kind == ArithAtom::Kind::End) {
    switch (op) {
      case Cmp::LT: op = Cmp::GT; break;
      case Cmp::LE: op = Cmp::GE; break;
      case Cmp::GT: op = Cmp::LT; break;
      case Cmp::GE: op = Cmp::LE; break;
      default: break;
    }
  }
  switch (op) {
    case Cmp::EQ: iv = iv.meet({k, k}); break;
    case Cmp::LT: iv = iv.meet({INT_MIN / 4, k - 1}); break;
    case Cmp::LE: iv = iv.meet({INT_MIN / 4, k}); break;
    case Cmp::GT: iv = iv.meet({k + 1, INF}); break;
    case Cmp::GE: iv = iv.meet({k, INF}); break;
  }
  return b;
}

// Turns bounds back into canonical literals with offset <= 0 for min and
// >= 0 for max. Caller guarantees the bounds are not empty.
inline std::vector<Hyp> bounds_literals(Var v, const VarBounds& b) {
  std::vector<Hyp> out;
  if (b.start.hi < INF) out.push_back(minlit({v, -(b.start.hi - 1)}, true));
  if (b.start.lo >= 2) out.push_back(minlit({v, -(b.start.lo - 2)}, false));
  if (b.end.lo >= 1) out.push_back(maxlit({v, b.end.lo - 1}, false));
  if (b.end.hi < INF) out.push_back(maxlit({v, b.end.hi}, true));
  return out;
}

inline std::vector<Hyp> desugar_arith(const ArithAtom& a) {
  if (a.kind == ArithAtom::Kind::Rel) return {a};
  // One canonical interval, then back to literals.
  VarBounds b = arith_bounds(a);
  VarBounds base;
  b = meet(base, b);
  if (b.empty()) {
    // unsatisfiable, keep it unsatisfiable with min and not min
    return {minlit({a.var, 0}), minlit({a.var, 0}, false)};
  }
  return bounds_literals(a.var, b);
}

// ---- validation ----

struct Diagnostic {
  int clause = -1;
  std::string rule;
  std::string message;
  SourceSpan span;
  bool error = true;
};

struct ValidateOptions {
  bool insert_guards = true;
  int max_offset = 8;
};

struct ValidationReport {
  std::vector<Diagnostic> diags;
  int guards_inserted = 0;
  bool ok() const {
    for (auto& d : diags)
      if (d.error) return false;
    return true;
  }
};

// Lower bounds implied by a clause's hypotheses, with one round of
// propagation through x + k <= y style relations.
struct ClauseFacts {
  int start_lo[2] = {1, 1};
  int end_lo[2] = {0, 0};
  int rel_min_gap = INT_MIN;  // largest k with x + k <= y implied
};

inline ClauseFacts clause_facts(const Clause& c) {
  ClauseFacts f;
  for (auto& h : c.hyps) {
    if (auto l = as<InputLiteral>(h)) {
      if (l->kind == InKind::Q) continue;
      auto alts = literal_bounds(l->kind, l->positive, l->term.offset);
      if (alts.size() != 1) continue;
      int v = int(l->term.var);
      f.start_lo[v] = std::max(f.start_lo[v], alts[0].start.lo);
      f.end_lo[v] = std::max(f.end_lo[v], alts[0].end.lo);
    } else if (auto a = as<ArithAtom>(h)) {
      if (a->kind == ArithAtom::Kind::Rel) {
        int gap = INT_MIN;
        if (a->op == Cmp::EQ || a->op == Cmp::LE) gap = a->k;
        if (a->op == Cmp::LT) gap = a->k + 1;
        f.rel_min_gap = std::max(f.rel_min_gap, gap);
      } else {
        auto b = arith_bounds(*a);
        int v = int(a->var);
        f.start_lo[v] = std::max(f.start_lo[v], b.start.lo);
        f.end_lo[v] = std::max(f.end_lo[v], b.end.lo);
      }
    }
  }
  if (f.rel_min_gap != INT_MIN) {
    int g = f.rel_min_gap;
    f.start_lo[1] = std::max(f.start_lo[1], f.start_lo[0] + g);
    f.end_lo[0] = std::max(f.end_lo[0], f.end_lo[1] + g);
  }
  return f;
}

inline bool clause_has_rel(const Clause& c, Cmp op, int k = 0) {
  for (auto& h : c.hyps)
    if (auto a = as<ArithAtom>(h))
      if (a->kind == ArithAtom::Kind::Rel && a->op == op && a->k == k) return true;
  return false;
}

inline bool clause_has_q(const Clause& c) {
  for (auto& h : c.hyps)
    if (auto l = as<InputLiteral>(h))
      if (l->kind == InKind::Q) return true;
  return false;
}

inline ValidationReport validate(Formula& f, const ValidateOptions& opt = {}) {
  ValidationReport rep;
  auto diag = [&](int ci, const std::string& rule, const std::string& msg, bool err = true) {
    rep.diags.push_back({ci, rule, msg, ci >= 0 ? f.clauses[ci].span : SourceSpan{}, err});
  };
  int m = int(f.preds.size());
  int sigma = int(f.alphabet.size());
  if (sigma == 0) diag(-1, "alphabet", "empty alphabet");
  if (f.bottom && (*f.bottom < 0 || *f.bottom >= m)) diag(-1, "bottom", "contradiction predicate out of range");
  for (int ci = 0; ci < int(f.clauses.size()); ++ci) {
    Clause& c = f.clauses[ci];
    bool pred_like = f.logic != Logic::INCL;
    auto check_term = [&](const Term& t, const char* what) {
      if (std::abs(t.offset) > opt.max_offset)
        diag(ci, "offset-cap", std::string(what) + " offset exceeds the cap of " + std::to_string(opt.max_offset));
      if (pred_like && t.offset > 0)
        diag(ci, "positive-offset", std::string("positive offset in predecessor fragment (") + what + ")");
    };
    if (!c.is_false && (c.head < 0 || c.head >= m)) diag(ci, "unknown-predicate", "conclusion predicate out of range");
    bool has_eq = false, has_incl_rel = false, has_q = false;
    std::vector<Hyp> guards;
    ClauseFacts facts = clause_facts(c);
    // x=1 and y=n already order the pair
    bool ends = false;
    for (auto& h : c.hyps)
      if (auto l = as<InputLiteral>(h); l && l->kind == InKind::MIN && l->positive && l->term == Term{Var::X, 0})
        for (auto& h2 : c.hyps)
          if (auto r = as<InputLiteral>(h2); r && r->kind == InKind::MAX && r->positive && r->term == Term{Var::Y, 0})
            ends = true;
    if (ends) facts.rel_min_gap = std::max(facts.rel_min_gap, 0);
    for (auto& h : c.hyps) {
      if (auto l = as<InputLiteral>(h)) {
        check_term(l->term, l->kind == InKind::Q ? "input letter" : l->kind == InKind::MIN ? "min" : "max");
        if (l->kind == InKind::Q) {
          has_q = true;
          if (!l->positive) diag(ci, "negated-letter", "negation over an input letter predicate");
          if (l->letter < 0 || l->letter >= sigma) diag(ci, "unknown-letter", "letter outside the alphabet");
          int v = int(l->term.var), k = l->term.offset;
          if (k < 0 && facts.start_lo[v] < 1 - k) {
            guards.push_back(minlit({l->term.var, k + 1}, false));
          }
          if (k > 0 && facts.end_lo[v] < k) {
            guards.push_back(maxlit({l->term.var, k - 1}, false));
          }
        }
      } else if (auto a = as<ArithAtom>(h)) {
        if (a->kind == ArithAtom::Kind::Rel) {
          if (std::abs(a->k) > opt.max_offset) diag(ci, "offset-cap", "relation offset exceeds the cap");
          if (f.logic == Logic::PRED) diag(ci, "relation-in-pred", "variable comparison in predecessor fragment");
          if (f.logic == Logic::PRED_DIO && !(a->op == Cmp::EQ && a->k == 0))
            diag(ci, "relation-in-dio", "only x=y is allowed in the diagonal fragment");
          if (a->op == Cmp::EQ && a->k == 0) has_eq = true;
          if ((a->op == Cmp::EQ || a->op == Cmp::LE || a->op == Cmp::LT) && a->k >= 0) has_incl_rel = true;
        } else {
          if (a->k < 0 || a->k > opt.max_offset + 1) diag(ci, "constant-range", "constant out of range");
          if (a->kind == ArithAtom::Kind::Start && a->k < 1) diag(ci, "constant-range", "constant must be at least 1");
          for (auto& d : desugar_arith(*a))
            if (auto l = as<InputLiteral>(d)) check_term(l->term, "constant comparison");
        }
      } else if (auto p = as<CompAtom>(h)) {
        if (p->pred < 0 || p->pred >= m) {
          diag(ci, "unknown-predicate", "hypothesis predicate out of range");
          continue;
        }
        check_term(p->a1, "atom");
        check_term(p->a2, "atom");
        if (pred_like) {
          if (p->a1.var == p->a2.var) diag(ci, "atom-shape", "atom arguments must use both variables");
          for (Term t : {p->a1, p->a2})
            if (t.offset < 0 && facts.start_lo[int(t.var)] < 1 - t.offset)
              guards.push_back(minlit({t.var, t.offset + 1}, false));
        } else {
          if (!(p->a1.var == Var::X && p->a2.var == Var::Y && p->a1.offset >= 0 && p->a2.offset <= 0)) {
            diag(ci, "atom-shape", "inclusion atoms must have the shape S(x+a,y-b)");
          } else {
            int need = p->a1.offset - p->a2.offset;
            if (facts.rel_min_gap < need) guards.push_back(rel(Cmp::LE, need));
          }
        }
      }
    }
    if (f.logic == Logic::PRED && has_eq) diag(ci, "relation-in-pred", "x=y in predecessor fragment");
    if (f.logic == Logic::PRED_DIO) {
      if (has_q && !has_eq) diag(ci, "dio-input", "input letters must be paired with x=y in the diagonal fragment");
      if (has_eq && !has_q) diag(ci, "dio-extension", "x=y without an input letter (accepted as an extension)", false);
    }
    if (f.logic == Logic::INCL && !has_incl_rel && !ends) {
      if (opt.insert_guards) {
        c.hyps.push_back(rel(Cmp::LE, 0));
        ++rep.guards_inserted;
      } else {
        diag(ci, "incl-guard", "inclusion clause without x<=y");
      }
    }
    std::sort(guards.begin(), guards.end());
    guards.erase(std::unique(guards.begin(), guards.end()), guards.end());
    std::erase_if(guards, [&](const Hyp& g) { return std::find(c.hyps.begin(), c.hyps.end(), g) != c.hyps.end(); });
    if (!guards.empty()) {
      if (opt.insert_guards) {
        for (auto& g : guards) c.hyps.push_back(g);
        rep.guards_inserted += int(guards.size());
      } else {
        diag(ci, "missing-guard", "offset atom without its range guard");
      }
    }
  }
  return rep;
}

inline void validate_or_throw(Formula& f, const ValidateOptions& opt = {}) {
  auto rep = validate(f, opt);
  if (!rep.ok()) {
    for (auto& d : rep.diags)
      if (d.error)
        throw Error("clause " + std::to_string(d.clause + 1) + ": " + d.rule + ": " + d.message);
  }
}

// ---- desugaring ----

inline Formula desugar(const Formula& in) {
  Formula f = in;
  for (auto& c : f.clauses) {
    std::vector<Hyp> out;
    for (auto& h : c.hyps) {
      if (auto a = as<ArithAtom>(h)) {
        for (auto& d : desugar_arith(*a)) out.push_back(d);
      } else {
        out.push_back(h);
      }
    }
    c.hyps = std::move(out);
  }
  return f;
}

inline std::pair<int, int> max_offset(const Formula& f) {
  int A = 0, B = 0;
  auto see = [&](const Term& t) {
    int& m = t.var == Var::X ? A : B;
    m = std::max(m, std::abs(t.offset));
  };
  for (auto& c : f.clauses)
    for (auto& h : c.hyps) {
      if (auto l = as<InputLiteral>(h)) see(l->term);
      if (auto p = as<CompAtom>(h)) {
        see(p->a1);
        see(p->a2);
      }
    }
  return {A, B};
}

}  // namespace hornlab
