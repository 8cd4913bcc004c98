// Normalization of inclusion formulas. A site (x,y) of the normal form only
// sees the factor w_x..w_y, so everything a clause says about the outside
// (how far x is from the start, y from the end, letters just outside) turns
// into a hypothesis carried in the predicate name: R_{<-H}(x,y) is the value
// R would have at (x,y) if the context were H. At (1,n) the context is known.
#pragma once

#include "fixpoint.hpp"
#include "grid.hpp"
#include "normalize_common.hpp"

namespace hornlab {

namespace incl_steps {

struct Pos2 {
  int p = 1;  // start position of x; == PA+1 means "at least PA+1"
  int e = 0;  // n - y; == PB+1 means "at least PB+1"
  bool operator<(const Pos2& o) const { return std::tie(p, e) < std::tie(o.p, o.e); }
};

struct Hypo {
  int base = -1;  // predicate of the step-4 formula
  Pos2 pos;
  std::string left, right;  // letters just outside, nearest last / nearest first
  bool lettered = false;
};

struct Ctx {
  Names names;
  int bot = -1;
  std::set<int> plain;  // inside features: no hypotheses
  int PA = 1, PB = 0, WL = 0, WR = 0, K = 2;
  std::map<int, Hypo> hyp;  // hypothesised predicate -> what it stands for
  std::map<std::tuple<int, int, int>, int> pos_pred;
  std::map<std::tuple<int, std::string, std::string>, int> letter_pred;
  KStats kstats;
};

// ---- plain inside features ----

inline std::string offset_name(Var v, int k) {
  std::string s = var_name(v);
  if (k > 0) s += "+" + std::to_string(k);
  if (k < 0) s += std::to_string(k);
  return s;
}

// letter s at x+k (k >= 0), provided x+k <= y
inline int from_left(Formula& f, Ctx& cx, int k, int s) {
  bool made = false;
  int p = cx.names.get(f, "W^{" + offset_name(Var::X, k) + "}_{" + f.alphabet[s] + "}", &made);
  if (made) {
    cx.plain.insert(p);
    if (k == 0) {
      f.clauses.push_back(make_clause({rel(Cmp::EQ), qlit(s, tx())}, p));
      f.clauses.push_back(make_clause({rel(Cmp::LT), atom(p, tx(), ty(-1))}, p));
    } else {
      f.clauses.push_back(make_clause({rel(Cmp::LT), atom(from_left(f, cx, k - 1, s), tx(1), ty())}, p));
    }
  }
  return p;
}

// letter s at y-k, provided x <= y-k
inline int from_right(Formula& f, Ctx& cx, int k, int s) {
  bool made = false;
  int p = cx.names.get(f, "W^{" + offset_name(Var::Y, -k) + "}_{" + f.alphabet[s] + "}", &made);
  if (made) {
    cx.plain.insert(p);
    if (k == 0) {
      f.clauses.push_back(make_clause({rel(Cmp::EQ), qlit(s, tx())}, p));
      f.clauses.push_back(make_clause({rel(Cmp::LT), atom(p, tx(1), ty())}, p));
    } else {
      f.clauses.push_back(make_clause({rel(Cmp::LT), atom(from_right(f, cx, k - 1, s), tx(), ty(-1))}, p));
    }
  }
  return p;
}

// length y-x+1 >= j  (ge) or <= j
inline int len_pred(Formula& f, Ctx& cx, bool ge, int j) {
  bool made = false;
  int p = cx.names.get(f, std::string("Len_{") + (ge ? ">=" : "<=") + std::to_string(j) + "}", &made);
  if (made) {
    cx.plain.insert(p);
    int sigma = int(f.alphabet.size());
    if (ge) {
      if (j <= 1) {
        for (int s = 0; s < sigma; ++s) f.clauses.push_back(make_clause({rel(Cmp::EQ), qlit(s, tx())}, p));
        f.clauses.push_back(make_clause({rel(Cmp::LT), atom(p, tx(), ty(-1))}, p));
      } else {
        f.clauses.push_back(make_clause({rel(Cmp::LT), atom(len_pred(f, cx, true, j - 1), tx(1), ty())}, p));
      }
    } else {
      for (int s = 0; s < sigma; ++s) f.clauses.push_back(make_clause({rel(Cmp::EQ), qlit(s, tx())}, p));
      if (j >= 2)
        f.clauses.push_back(make_clause({rel(Cmp::LT), atom(len_pred(f, cx, false, j - 1), tx(1), ty())}, p));
    }
  }
  return p;
}

// Step 1: contradictions feed R_bot, carried to (1,n).
inline void step1(Formula& f, Ctx& cx) {
  f = desugar(f);
  cx.bot = cx.names.get(f, "Bot");
  std::vector<Clause> out;
  for (auto& c : f.clauses) out.push_back(c.is_false ? make_clause(c.hyps, cx.bot) : c);
  out.push_back(make_clause({rel(Cmp::LT), atom(cx.bot, tx(1), ty())}, cx.bot));
  out.push_back(make_clause({rel(Cmp::LT), atom(cx.bot, tx(), ty(-1))}, cx.bot));
  out.push_back(make_false({minlit(tx()), maxlit(ty()), atom(cx.bot)}));
  f.clauses = std::move(out);
  f.bottom = cx.bot;
}

// Step 2: letters that the guards place inside [x,y] are read through
// predicates fed on the diagonal.
inline void step2(Formula& f, Ctx& cx) {
  size_t n = f.clauses.size();
  for (size_t i = 0; i < n; ++i) {
    Clause c = f.clauses[i];
    if (c.is_false) continue;
    int gap = clause_facts(c).rel_min_gap;
    for (auto& h : c.hyps) {
      auto l = as<InputLiteral>(h);
      if (!l || l->kind != InKind::Q) continue;
      int k = l->term.offset;
      if (l->term.var == Var::X && k >= 0 && gap >= k) h = atom(from_left(f, cx, k, l->letter));
      else if (l->term.var == Var::Y && k <= 0 && gap >= -k) h = atom(from_right(f, cx, -k, l->letter));
    }
    canon(c);
    f.clauses[i] = c;
  }
}

// Step 3: min/max literals in canonical bounds, one clause per disjunct.
inline void step3(Formula& f, Ctx&) {
  std::vector<Clause> out;
  for (auto& c : f.clauses) {
    if (c.is_false) {
      out.push_back(c);
      continue;
    }
    std::vector<Hyp> rest;
    std::vector<std::vector<std::pair<Var, VarBounds>>> alts;
    for (auto& h : c.hyps) {
      auto l = as<InputLiteral>(h);
      if (l && l->kind != InKind::Q) {
        std::vector<std::pair<Var, VarBounds>> a;
        for (auto& b : literal_bounds(l->kind, l->positive, l->term.offset)) a.push_back({l->term.var, b});
        alts.push_back(a);
      } else {
        rest.push_back(h);
      }
    }
    std::vector<std::array<VarBounds, 2>> combos{{VarBounds{}, VarBounds{}}};
    for (auto& a : alts) {
      std::vector<std::array<VarBounds, 2>> next;
      for (auto& cb : combos)
        for (auto& [v, b] : a) {
          auto nb = cb;
          nb[int(v)] = meet(nb[int(v)], b);
          if (!nb[int(v)].empty()) next.push_back(nb);
        }
      combos = std::move(next);
    }
    for (auto& cb : combos) {
      Clause d = make_clause(rest, c.head);
      for (Var v : {Var::X, Var::Y})
        for (auto& h : bounds_literals(v, cb[int(v)])) d.hyps.push_back(h);
      canon(d);
      out.push_back(d);
    }
  }
  f.clauses = std::move(out);
}

// Step 4: atoms only at (x,y), (x+1,y), (x,y-1).
// S^{x+a,y-b}(x,y) <=> x+a <= y-b and S(x+a,y-b).
inline void step4(Formula& f, Ctx& cx) {
  std::vector<Clause> defs;
  std::function<int(int, int, int)> shift = [&](int s, int a, int b) -> int {
    if (a == 0 && b == 0) return s;
    bool made = false;
    int p = cx.names.get(f, f.preds[s] + "^{" + offset_name(Var::X, a) + "," + offset_name(Var::Y, -b) + "}", &made);
    if (made) {
      if (a >= 1) defs.push_back(make_clause({rel(Cmp::LT), atom(shift(s, a - 1, b), tx(1), ty())}, p));
      else defs.push_back(make_clause({rel(Cmp::LT), atom(shift(s, 0, b - 1), tx(), ty(-1))}, p));
    }
    return p;
  };
  for (auto& c : f.clauses) {
    if (c.is_false) continue;
    for (auto& h : c.hyps) {
      auto* a = std::get_if<CompAtom>(&h);
      if (!a || cx.plain.count(a->pred)) continue;
      int da = a->a1.offset, db = -a->a2.offset;
      if (da + db <= 1) continue;
      if (da >= 1) h = atom(shift(a->pred, da - 1, db), tx(1), ty());
      else h = atom(shift(a->pred, 0, db - 1), tx(), ty(-1));
    }
    canon(c);
  }
  for (auto& d : defs) f.clauses.push_back(d);
}

// ---- step 5: positions ----

struct Val {
  long v;
  bool exact;
};

enum class Tri { F, T, U };

inline Tri in_iv(Val x, Interval iv) {
  if (x.exact) return x.v >= iv.lo && x.v <= iv.hi ? Tri::T : Tri::F;
  if (iv.hi < x.v) return Tri::F;
  if (iv.lo <= x.v && iv.hi >= INF) return Tri::T;
  return Tri::U;
}

inline void size_context(const Formula& f, Ctx& cx) {
  int M = 0, minoff = 0, maxoff = 0;
  for (auto& c : f.clauses)
    for (auto& h : c.hyps) {
      if (auto l = as<InputLiteral>(h)) {
        int k = l->term.offset;
        M = std::max(M, std::abs(k));
        if (l->kind == InKind::Q) {
          if (k < 0) cx.WL = std::max(cx.WL, -k);
          if (k > 0) cx.WR = std::max(cx.WR, k);
        } else if (l->kind == InKind::MIN) {
          minoff = std::max(minoff, std::max(0, -k));
        } else {
          maxoff = std::max(maxoff, std::max(0, k));
        }
      } else if (auto a = as<ArithAtom>(h)) {
        M = std::max(M, std::abs(a->k));
      } else if (auto a = as<CompAtom>(h)) {
        M = std::max({M, std::abs(a->a1.offset), std::abs(a->a2.offset)});
      }
    }
  cx.PA = std::max({1, 1 + minoff, cx.WL});
  cx.PB = std::max({0, maxoff, cx.WR});
  cx.K = M + 2;
}

inline std::string pos_name(const Ctx& cx, Pos2 h) {
  std::string s = h.p <= cx.PA ? "x=" + std::to_string(h.p) : "x>" + std::to_string(cx.PA);
  s += ",";
  if (h.e <= cx.PB) s += h.e == 0 ? "y=n" : "y=n-" + std::to_string(h.e);
  else s += cx.PB == 0 ? "y<n" : "y<n-" + std::to_string(cx.PB);
  return s;
}

inline int pos_pred(Formula& f, Ctx& cx, int base, Pos2 h) {
  if (cx.plain.count(base)) return base;
  auto key = std::make_tuple(base, h.p, h.e);
  auto it = cx.pos_pred.find(key);
  if (it != cx.pos_pred.end()) return it->second;
  int p = cx.names.get(f, f.preds[base] + "_{<-" + pos_name(cx, h) + "}");
  cx.pos_pred[key] = p;
  cx.hyp[p] = Hypo{base, h, "", "", false};
  return p;
}

// Outcome of one literal at a site with context h and length len.
struct Outcome {
  enum { FALSE_, TRUE_, HYP, UNDET } kind;
  Hyp h;
};

inline Outcome letter_outcome(Formula& f, Ctx& cx, Pos2 h, int len, bool len_exact, const InputLiteral& l) {
  int s = l.letter;
  bool pex = h.p <= cx.PA, eex = h.e <= cx.PB;
  auto left = [&](int d) -> Outcome {  // d >= 1 positions before x
    if (pex && h.p - d < 1) {
      if (h.p == 1) return {Outcome::HYP, atom(from_left(f, cx, 0, s))};
      d = h.p - 1;
    }
    return {Outcome::HYP, qlit(s, tx(-d))};
  };
  auto right = [&](int d) -> Outcome {  // d >= 1 positions after y
    if (eex && d > h.e) {
      if (h.e == 0) return {Outcome::HYP, atom(from_right(f, cx, 0, s))};
      d = h.e;
    }
    return {Outcome::HYP, qlit(s, ty(d))};
  };
  int k = l.term.offset;
  if (l.term.var == Var::X) {
    if (k < 0) return left(-k);
    if (!len_exact || k < len) return {Outcome::HYP, atom(from_left(f, cx, k, s))};
    return right(k - (len - 1));
  }
  if (k > 0) return right(k);
  if (!len_exact || -k < len) return {Outcome::HYP, atom(from_right(f, cx, -k, s))};
  return left(-k - (len - 1));
}

inline Outcome eval_literal(Formula& f, Ctx& cx, Pos2 h, int len, bool len_exact, const Hyp& hyp) {
  if (auto a = as<ArithAtom>(hyp)) {
    // x + k op y  <=>  k op len-1
    if (len_exact) return {detail::cmp(a->k, a->op, len - 1) ? Outcome::TRUE_ : Outcome::FALSE_, {}};
    bool lo = detail::cmp(a->k, a->op, len - 1), hi = detail::cmp(a->k, a->op, len - 1 + 1000);
    if (lo != hi) return {Outcome::UNDET, {}};
    return {lo ? Outcome::TRUE_ : Outcome::FALSE_, {}};
  }
  auto l = as<InputLiteral>(hyp);
  if (l->kind == InKind::Q) return letter_outcome(f, cx, h, len, len_exact, *l);
  bool pex = h.p <= cx.PA, eex = h.e <= cx.PB;
  Val start = l->term.var == Var::X ? Val{h.p, pex} : Val{h.p + len - 1, pex && len_exact};
  Val end = l->term.var == Var::Y ? Val{h.e, eex} : Val{h.e + len - 1, eex && len_exact};
  bool undet = false;
  for (auto& b : literal_bounds(l->kind, l->positive, l->term.offset)) {
    Tri a = in_iv(start, b.start), c = in_iv(end, b.end);
    if (a == Tri::T && c == Tri::T) return {Outcome::TRUE_, {}};
    if (a != Tri::F && c != Tri::F) undet = true;
  }
  return {undet ? Outcome::UNDET : Outcome::FALSE_, {}};
}

// Step 5: hypotheses on the positions of x and y.
inline void step5(Formula& f, Ctx& cx) {
  size_context(f, cx);
  std::vector<Pos2> all;
  for (int p = 1; p <= cx.PA + 1; ++p)
    for (int e = 0; e <= cx.PB + 1; ++e) all.push_back({p, e});
  std::vector<Clause> in = f.clauses, out;
  for (auto& c : in) {
    if (c.is_false) {
      Clause d = c;
      for (auto& h : d.hyps)
        if (auto* a = std::get_if<CompAtom>(&h)) a->pred = pos_pred(f, cx, a->pred, {1, 0});
      out.push_back(d);
      continue;
    }
    if (cx.plain.count(c.head)) {
      out.push_back(c);
      continue;
    }
    for (Pos2 h : all) {
      // per length class: the surviving hypotheses, or nothing when the clause is dead
      std::vector<std::optional<std::vector<Hyp>>> per_len;
      for (int len = 1; len <= cx.K + 1; ++len) {
        bool exact = len <= cx.K;
        std::optional<std::vector<Hyp>> body = std::vector<Hyp>{};
        for (auto& hy : c.hyps) {
          if (auto a = as<CompAtom>(hy)) {
            Pos2 ch = h;
            if (a->a1.offset == 1) ch.p = std::min(h.p + 1, cx.PA + 1);
            if (a->a2.offset == -1) ch.e = std::min(h.e + 1, cx.PB + 1);
            body->push_back(atom(pos_pred(f, cx, a->pred, ch), a->a1, a->a2));
            continue;
          }
          Outcome o = eval_literal(f, cx, h, len, exact, hy);
          if (o.kind == Outcome::UNDET) throw Error("context too small while removing positions (internal)");
          if (o.kind == Outcome::FALSE_) {
            body.reset();
            break;
          }
          if (o.kind == Outcome::HYP) body->push_back(o.h);
        }
        if (body) {
          Clause tmp = make_clause(*body, 0);
          canon(tmp);
          body = tmp.hyps;
        }
        per_len.push_back(body);
      }
      int head = pos_pred(f, cx, c.head, h);
      for (int i = 0; i < int(per_len.size());) {
        int j = i;
        while (j + 1 < int(per_len.size()) && per_len[j + 1] == per_len[i]) ++j;
        if (per_len[i]) {
          Clause d = make_clause(*per_len[i], head);
          d.hyps.push_back(rel(Cmp::LE));
          int lo = i + 1, hi = j + 1;  // hi == K+1 means unbounded
          if (lo >= 2) d.hyps.push_back(atom(len_pred(f, cx, true, lo)));
          if (hi <= cx.K) d.hyps.push_back(atom(len_pred(f, cx, false, hi)));
          canon(d);
          out.push_back(d);
        }
        i = j + 1;
      }
    }
  }
  // plain definitions created while evaluating were appended to f.clauses
  for (size_t i = in.size(); i < f.clauses.size(); ++i) out.push_back(f.clauses[i]);
  f.clauses = std::move(out);
  f.bottom = pos_pred(f, cx, cx.bot, {1, 0});
}

// ---- step 6: letters just outside ----

inline std::vector<std::string> strings(const Formula& f, int len) {
  std::vector<std::string> out{""};
  for (int i = 0; i < len; ++i) {
    std::vector<std::string> next;
    for (auto& s : out)
      for (size_t c = 0; c < f.alphabet.size(); ++c) next.push_back(s + char('0' + c));
    out = next;
  }
  return out;
}

inline int left_window(const Ctx& cx, Pos2 h) { return std::min(h.p - 1, cx.WL); }
inline int right_window(const Ctx& cx, Pos2 h) { return std::min(h.e, cx.WR); }

inline int letter_pred(Formula& f, Ctx& cx, int p, const std::string& u, const std::string& v) {
  auto it = cx.hyp.find(p);
  if (it == cx.hyp.end()) return p;  // plain
  auto key = std::make_tuple(p, u, v);
  auto jt = cx.letter_pred.find(key);
  if (jt != cx.letter_pred.end()) return jt->second;
  std::string name = f.preds[p];
  if (!u.empty() || !v.empty()) {
    auto spell = [&](const std::string& s) {
      std::string r;
      for (char ch : s) r += f.alphabet[ch - '0'];
      return r;
    };
    name += "[" + spell(u) + "|" + spell(v) + "]";
  }
  int q = cx.names.get(f, name);
  cx.letter_pred[key] = q;
  return q;
}

// Step 6: hypotheses on the letters just outside [x,y].
inline void step6(Formula& f, Ctx& cx) {
  std::vector<Clause> in = f.clauses, out;
  for (auto& c : in) {
    if (c.is_false) {
      Clause d = c;
      for (auto& h : d.hyps)
        if (auto* a = std::get_if<CompAtom>(&h)) a->pred = letter_pred(f, cx, a->pred, "", "");
      out.push_back(d);
      continue;
    }
    auto hit = cx.hyp.find(c.head);
    if (hit == cx.hyp.end()) {
      out.push_back(c);
      continue;
    }
    Pos2 h = hit->second.pos;
    bool need_wx = false, need_wy = false;
    for (auto& a : comps(c)) {
      auto ah = cx.hyp.find(a.pred);
      if (ah == cx.hyp.end()) continue;
      if (a.a1.offset == 1 && left_window(cx, ah->second.pos) > 0) need_wx = true;
      if (a.a2.offset == -1 && right_window(cx, ah->second.pos) > 0) need_wy = true;
    }
    int sigma = int(f.alphabet.size());
    for (auto& u : strings(f, left_window(cx, h)))
      for (auto& v : strings(f, right_window(cx, h)))
        for (int cxl = 0; cxl < (need_wx ? sigma : 1); ++cxl)
          for (int cyl = 0; cyl < (need_wy ? sigma : 1); ++cyl) {
            Clause d = make_clause({}, letter_pred(f, cx, c.head, u, v));
            bool dead = false;
            for (auto& hy : c.hyps) {
              if (auto l = as<InputLiteral>(hy); l && l->kind == InKind::Q) {
                int dist = std::abs(l->term.offset);
                char got = l->term.var == Var::X ? u[u.size() - dist] : v[dist - 1];
                if (got - '0' != l->letter) dead = true;
                continue;
              }
              if (auto a = as<CompAtom>(hy)) {
                auto ah = cx.hyp.find(a->pred);
                if (ah == cx.hyp.end()) {
                  d.hyps.push_back(hy);
                  continue;
                }
                Pos2 ch = ah->second.pos;
                std::string cu = u, cv = v;
                if (a->a1.offset == 1) cu += char('0' + cxl);
                if (a->a2.offset == -1) cv = char('0' + cyl) + cv;
                cu = cu.substr(cu.size() - std::min<size_t>(cu.size(), left_window(cx, ch)));
                cv = cv.substr(0, right_window(cx, ch));
                d.hyps.push_back(atom(letter_pred(f, cx, a->pred, cu, cv), a->a1, a->a2));
                continue;
              }
              d.hyps.push_back(hy);
            }
            if (dead) continue;
            if (need_wx) d.hyps.push_back(atom(from_left(f, cx, 0, cxl)));
            if (need_wy) d.hyps.push_back(atom(from_right(f, cx, 0, cyl)));
            canon(d);
            out.push_back(d);
          }
  }
  for (size_t i = in.size(); i < f.clauses.size(); ++i) out.push_back(f.clauses[i]);
  f.clauses = std::move(out);
  f.bottom = letter_pred(f, cx, *f.bottom, "", "");
  cx.bot = *f.bottom;
}

// ---- step 7 ----

inline bool is_lt(const Hyp& h) {
  auto a = as<ArithAtom>(h);
  return a && a->kind == ArithAtom::Kind::Rel && a->op == Cmp::LT && a->k == 0;
}
inline bool is_le(const Hyp& h) {
  auto a = as<ArithAtom>(h);
  return a && a->kind == ArithAtom::Kind::Rel && a->op == Cmp::LE && a->k == 0;
}

enum class Side { SAME, RIGHT, DOWN };
inline Side side_of(const CompAtom& a) {
  if (a.a1 == tx(1) && a.a2 == ty()) return Side::RIGHT;
  if (a.a1 == tx() && a.a2 == ty(-1)) return Side::DOWN;
  if (a.a1 == tx() && a.a2 == ty()) return Side::SAME;
  throw Error("unexpected atom shape in the last inclusion step");
}

// Step 7: no same-site hypotheses. Diagonal sites only have their letter, so
// they get the closure directly; other sites get one clause per minimal set
// of neighbour atoms.
inline void step7(Formula& f, Ctx& cx, const NormalizeOptions& opt) {
  int sigma = int(f.alphabet.size());
  int T = cx.names.get(f, "T");
  int m = int(f.preds.size());
  PropositionalHornProblem theta;
  theta.vars = m;
  std::vector<std::vector<int>> facts(sigma);
  std::map<std::pair<int, Side>, int> idx;
  std::vector<std::pair<int, Side>> items;
  std::vector<std::vector<int>> heads;
  auto item = [&](int p, Side s) {
    auto key = std::make_pair(p, s);
    auto it = idx.find(key);
    if (it == idx.end()) {
      it = idx.emplace(key, int(items.size())).first;
      items.push_back(key);
      heads.emplace_back();
    }
    return it->second;
  };
  for (int s = 0; s < sigma; ++s) facts[s].push_back(T);
  heads.reserve(64);
  int tdown = item(T, Side::DOWN);
  heads[tdown].push_back(T);

  int aux = 0;
  for (auto& c : f.clauses) {
    if (c.is_false) continue;
    std::vector<Hyp> rest;
    std::optional<int> letter;
    bool eq = false, lt = false;
    for (auto& h : c.hyps) {
      if (is_eq(h)) eq = true;
      else if (is_lt(h)) lt = true;
      else if (is_le(h)) continue;
      else if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q && l->term == tx()) letter = l->letter;
      else rest.push_back(h);
    }
    if (eq) {
      if (!letter || !rest.empty()) throw Error("unexpected diagonal clause in the last inclusion step");
      facts[*letter].push_back(c.head);
      continue;
    }
    HornClause hc;
    hc.head = c.head;
    std::vector<std::pair<int, Side>> nbrs;
    for (auto& h : rest) {
      auto a = as<CompAtom>(h);
      if (!a) throw Error("literal left over in the last inclusion step");
      Side sd = side_of(*a);
      if (sd == Side::SAME) hc.body.push_back(a->pred);
      else nbrs.push_back({a->pred, sd});
    }
    if (nbrs.size() == 1 && hc.body.empty()) {
      heads[item(nbrs[0].first, nbrs[0].second)].push_back(c.head);
      continue;
    }
    // the neighbour atoms are only meaningful off the diagonal
    (void)lt;
    for (auto& [p, sd] : nbrs) {
      int q = cx.names.get(f, "Aux" + std::to_string(++aux));
      theta.vars = int(f.preds.size());
      heads[item(p, sd)].push_back(q);
      hc.body.push_back(q);
    }
    theta.clauses.push_back(hc);
  }
  m = int(f.preds.size());
  theta.vars = m;

  Formula g;
  g.logic = f.logic;
  g.alphabet = f.alphabet;
  g.preds = f.preds;
  for (int s = 0; s < sigma; ++s)
    for (int h : closure_set(theta, facts[s])) g.clauses.push_back(make_clause({rel(Cmp::EQ), qlit(s, tx())}, h));

  GroupedHorn gh;
  gh.theta = theta;
  gh.group_heads = heads;
  for (auto& [S, h] : k_clauses(gh, opt.full_subsets, &cx.kstats)) {
    std::vector<Hyp> body{rel(Cmp::LT)};
    if (S.empty()) body.push_back(atom(T, tx(), ty(-1)));
    for (int i : S) {
      auto [p, sd] = items[i];
      body.push_back(sd == Side::RIGHT ? atom(p, tx(1), ty()) : atom(p, tx(), ty(-1)));
    }
    g.clauses.push_back(make_clause(body, h));
  }
  g.clauses.push_back(make_false({minlit(tx()), maxlit(ty()), atom(cx.bot)}));
  for (auto& c : g.clauses) canon(c);
  g.bottom = cx.bot;
  f = std::move(g);
}

}  // namespace incl_steps

inline NormalizeResult normalize_incl_traced(const Formula& input, const NormalizeOptions& opt = {}) {
  using namespace incl_steps;
  if (input.logic != Logic::INCL) throw Error("normalize_incl expects an incl formula");
  NormalizeResult res;
  Formula f = input;
  validate_or_throw(f);
  Ctx cx;
  auto run = [&](int k, auto&& fn) {
    if (opt.stop_after && k > opt.stop_after) return false;
    int before = int(f.preds.size());
    fn();
    record(res.trace, "step" + std::to_string(k), f, before);
    return true;
  };
  bool go = run(1, [&] { step1(f, cx); }) && run(2, [&] { step2(f, cx); }) && run(3, [&] { step3(f, cx); }) &&
            run(4, [&] { step4(f, cx); }) && run(5, [&] { step5(f, cx); }) && run(6, [&] { step6(f, cx); }) &&
            run(7, [&] {
              step7(f, cx, opt);
              if (opt.prune) {
                prune(f);
                while (drop_unneeded_clauses(f)) prune(f);
              }
            });
  (void)go;
  res.formula = f;
  res.kstats = cx.kstats;
  return res;
}

inline Formula normalize_incl(const Formula& f, const NormalizeOptions& opt = {}) {
  return normalize_incl_traced(f, opt).formula;
}

}  // namespace hornlab
