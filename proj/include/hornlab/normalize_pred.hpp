// Normalization of predecessor formulas, with and without diagonal input.
// Ten passes; each is a pure Formula -> Formula function so the trace can
// be checked step by step against the evaluator.
#pragma once

#include "grid.hpp"
#include "normalize_common.hpp"

namespace hornlab {

namespace pred_steps {

struct Ctx {
  Names names;
  bool dio = false;
  int bot = -1;
  std::set<int> order;  // R_=, R_succ, R_<, R_<=: defined once, never folded
  int eq = -1, lt = -1;
  std::set<int> maxdep;
  KStats kstats;
};

inline bool dio_diag_init(const Clause& c) {
  if (c.is_false || has_comp(c)) return false;
  bool eq = false, q = false;
  for (auto& h : c.hyps) {
    if (is_eq(h)) eq = true;
    else if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q) q = true;
    else return false;
  }
  return eq && q;
}

// literal-only clause min(v) ∧ [one literal on the other variable]
inline std::optional<Var> init_var(const Clause& c) {
  if (c.is_false || has_comp(c) || has_eq_atom(c)) return std::nullopt;
  auto ls = literals(c);
  if (ls.empty() || ls.size() > 2) return std::nullopt;
  for (Var v : {Var::X, Var::Y}) {
    bool has_min = false;
    int others = 0, same = 0;
    for (auto& l : ls) {
      if (l.kind == InKind::MIN && l.positive && l.term == Term{v, 0} && !has_min) has_min = true;
      else if (l.term.var == other(v) && l.term.offset == 0) ++others;
      else ++same;
    }
    if (has_min && same == 0 && others <= 1) return v;
  }
  return std::nullopt;
}

// Step 1: contradictions feed a single transported R_bot.
inline void step1(Formula& f, Ctx& cx) {
  f = desugar(f);
  cx.bot = cx.names.get(f, "Bot");
  std::vector<Clause> out;
  for (auto& c : f.clauses) {
    if (c.is_false) out.push_back(make_clause(c.hyps, cx.bot));
    else out.push_back(c);
  }
  out.push_back(make_clause({atom(cx.bot, tx(-1), ty()), minlit(tx(), false)}, cx.bot));
  out.push_back(make_clause({atom(cx.bot, tx(), ty(-1)), minlit(ty(), false)}, cx.bot));
  out.push_back(make_false({maxlit(tx()), maxlit(ty()), atom(cx.bot)}));
  f.clauses = std::move(out);
  f.bottom = cx.bot;
}

// Step 2: letters only inside the W^x_s / W^y_s definitions.
inline void step2(Formula& f, Ctx& cx) {
  std::vector<Clause> defs;
  auto W = [&](Var v, int s) {
    bool made = false;
    std::string key = std::string("W^") + var_name(v) + "_{" + f.alphabet[s] + "}";
    int p = cx.names.get(f, key, &made);
    if (made) {
      if (cx.dio) {
        defs.push_back(make_clause({rel(Cmp::EQ), qlit(s, tx())}, p));
        defs.push_back(make_clause({atom(p, tx(), ty(-1)), minlit(ty(), false)}, p));
      } else if (v == Var::X) {
        defs.push_back(make_clause({minlit(ty()), qlit(s, tx())}, p));
        defs.push_back(make_clause({atom(p, tx(), ty(-1)), minlit(ty(), false)}, p));
      } else {
        defs.push_back(make_clause({minlit(tx()), qlit(s, ty())}, p));
        defs.push_back(make_clause({atom(p, tx(-1), ty()), minlit(tx(), false)}, p));
      }
    }
    return p;
  };
  for (auto& c : f.clauses)
    for (auto& h : c.hyps)
      if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q) {
        Term t = l->term;
        if (cx.dio) t.var = Var::X;  // x=y is present
        int p = W(t.var, l->letter);
        h = t.var == Var::X ? atom(p, t, ty()) : atom(p, tx(), t);
      }
  for (auto& d : defs) f.clauses.push_back(d);
}

// Step 3: R^{x-a,y-b}(x,y) <=> x>a ∧ y>b ∧ R(x-a,y-b).
inline void step3(Formula& f, Ctx& cx) {
  std::vector<Clause> defs;
  std::function<int(int, int, int)> shift = [&](int r, int a, int b) -> int {
    if (a == 0 && b == 0) return r;
    bool made = false;
    std::string key = f.preds[r] + "^{x-" + std::to_string(a) + ",y-" + std::to_string(b) + "}";
    int p = cx.names.get(f, key, &made);
    if (made) {
      if (a >= 1) defs.push_back(make_clause({atom(shift(r, a - 1, b), tx(-1), ty()), minlit(tx(), false)}, p));
      else defs.push_back(make_clause({atom(shift(r, 0, b - 1), tx(), ty(-1)), minlit(ty(), false)}, p));
    }
    return p;
  };
  for (auto& c : f.clauses) {
    std::vector<Hyp> extra;
    for (auto& h : c.hyps) {
      auto* a = std::get_if<CompAtom>(&h);
      if (!a) continue;
      if (a->a1.var == Var::X && a->a2.var == Var::Y) {
        int da = -a->a1.offset, db = -a->a2.offset;
        if (da == 0 && db == 0) continue;
        if (da >= 1) {
          h = atom(shift(a->pred, da - 1, db), tx(-1), ty());
          extra.push_back(minlit(tx(), false));
        } else {
          h = atom(shift(a->pred, 0, db - 1), tx(), ty(-1));
          extra.push_back(minlit(ty(), false));
        }
      } else if (a->a1.var == Var::Y && a->a2.var == Var::X) {
        int db = -a->a1.offset, da = -a->a2.offset;
        h = atom(shift(a->pred, db, da), ty(), tx());
      } else {
        throw Error("atom with both arguments on one variable");
      }
    }
    for (auto& e : extra) c.hyps.push_back(e);
    canon(c);
  }
  for (auto& d : defs) f.clauses.push_back(d);
}

// Step 4: min/max literals with offsets become thresholds on x and y.
inline void step4(Formula& f, Ctx& cx) {
  std::vector<Clause> defs;
  std::function<int(Var, bool, int)> thr = [&](Var v, bool gt, int a) -> int {
    // gt: v > a ; else v <= a
    bool made = false;
    std::string key = std::string("R^{") + var_name(v) + (gt ? ">" : "<=") + std::to_string(a) + "}";
    int p = cx.names.get(f, key, &made);
    if (made) {
      Term self{v, 0}, prev{v, -1};
      auto nb = [&](int q) { return v == Var::X ? atom(q, tx(-1), ty()) : atom(q, tx(), ty(-1)); };
      if (gt) {
        if (a == 1) defs.push_back(make_clause({minlit(self, false)}, p));
        else defs.push_back(make_clause({nb(thr(v, true, a - 1)), minlit(self, false)}, p));
      } else {
        defs.push_back(make_clause({minlit(self)}, p));
        if (a >= 2) defs.push_back(make_clause({nb(thr(v, false, a - 1)), minlit(self, false)}, p));
      }
      (void)prev;
    }
    return p;
  };
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
    // expand the disjunctions
    std::vector<std::array<VarBounds, 2>> combos{{VarBounds{}, VarBounds{}}};
    for (auto& a : alts) {
      std::vector<std::array<VarBounds, 2>> next;
      for (auto& cb : combos)
        for (auto& [v, b] : a) {
          auto n = cb;
          n[int(v)] = meet(n[int(v)], b);
          if (!n[int(v)].empty()) next.push_back(n);
        }
      combos = std::move(next);
    }
    for (auto& cb : combos) {
      Clause d = make_clause(rest, c.head);
      for (Var v : {Var::X, Var::Y}) {
        const VarBounds& b = cb[int(v)];
        if (b.start.hi == 1) d.hyps.push_back(minlit({v, 0}));
        if (b.start.lo >= 2) d.hyps.push_back(minlit({v, 0}, false));
        if (b.start.lo >= 3) d.hyps.push_back(atom(thr(v, true, b.start.lo - 1)));
        if (b.start.hi >= 2 && b.start.hi < INF) d.hyps.push_back(atom(thr(v, false, b.start.hi)));
        if (b.end == Interval{0, 0}) d.hyps.push_back(maxlit({v, 0}));
        else if (b.end == Interval{1, INF}) d.hyps.push_back(maxlit({v, 0}, false));
        else if (!(b.end == Interval{0, INF})) throw Error("unexpected distance-to-end bound in a predecessor formula");
      }
      canon(d);
      out.push_back(d);
    }
  }
  for (auto& d : defs) out.push_back(d);
  f.clauses = std::move(out);
}

// Step 5: remaining literals become same-site atoms R^{eta}, then every
// clause is split into the one-neighbour / same-site forms.
inline void step5(Formula& f, Ctx& cx) {
  std::vector<Clause> defs;
  auto lit_pred = [&](const InputLiteral& l) {
    bool made = false;
    int p = cx.names.get(f, "R^{" + lit_key(l) + "}", &made);
    if (made) {
      Var v = l.term.var, o = other(v);
      defs.push_back(make_clause({minlit({o, 0}), Hyp(l)}, p));
      defs.push_back(make_clause({o == Var::Y ? atom(p, tx(), ty(-1)) : atom(p, tx(-1), ty()), minlit({o, 0}, false)}, p));
    }
    return p;
  };
  std::vector<Clause> out;
  for (auto& c : f.clauses) {
    if (c.is_false || init_var(c) || dio_diag_init(c)) {
      out.push_back(c);
      continue;
    }
    if (c.hyps.empty()) {
      out.push_back(make_clause({atom(lit_pred(*as<InputLiteral>(minlit(tx()))))}, c.head));
      out.push_back(make_clause({atom(lit_pred(*as<InputLiteral>(minlit(tx(), false))))}, c.head));
      continue;
    }
    bool xm1 = false, ym1 = false;
    for (auto& a : comps(c)) {
      xm1 |= pos_of(a) == Pos::XM1;
      ym1 |= pos_of(a) == Pos::YM1;
    }
    Clause d = make_clause({}, c.head);
    for (auto& h : c.hyps) {
      auto l = as<InputLiteral>(h);
      if (!l || (xm1 && is_lit(h, InKind::MIN, false, Var::X)) || (ym1 && is_lit(h, InKind::MIN, false, Var::Y))) {
        d.hyps.push_back(h);
        continue;
      }
      if (l->kind == InKind::Q) throw Error("input letter outside its definition after step 2");
      d.hyps.push_back(atom(lit_pred(*l)));
    }
    canon(d);
    out.push_back(d);
  }
  for (auto& d : defs) out.push_back(d);
  f.clauses = std::move(out);
  decompose(f, cx.names);
}

// Step 6: order predicates valid on the whole square; x=y becomes R_=.
inline void step6(Formula& f, Ctx& cx) {
  int eq = cx.names.get(f, "R_{=}");
  int succ = cx.names.get(f, "R_{succ}");
  int lt = cx.names.get(f, "R_{<}");
  int le = cx.names.get(f, "R_{<=}");
  cx.order = {eq, succ, lt, le};
  cx.eq = eq;
  cx.lt = lt;
  for (auto& c : f.clauses) {
    if (dio_diag_init(c)) continue;
    for (auto& h : c.hyps)
      if (is_eq(h)) h = atom(eq);
    canon(c);
  }
  f.clauses.push_back(make_clause({minlit(tx()), minlit(ty())}, eq));
  f.clauses.push_back(make_clause({minlit(tx(), false), atom(succ, tx(-1), ty())}, eq));
  f.clauses.push_back(make_clause({minlit(ty(), false), atom(eq, tx(), ty(-1))}, succ));
  f.clauses.push_back(make_clause({minlit(ty(), false), atom(le, tx(), ty(-1))}, lt));
  f.clauses.push_back(make_clause({atom(eq)}, le));
  f.clauses.push_back(make_clause({atom(lt)}, le));
}

// Step 7: everything below the diagonal is represented by R^inv above it.
// R(x,y) for x<=y keeps its meaning, R^inv(x,y) means R(y,x).
inline void step7(Formula& f, Ctx& cx) {
  std::set<int> folded;
  auto inv = [&](int p) {
    if (p == cx.bot || cx.order.count(p)) return p;  // R_= is symmetric; R_bot is identified with its inverse
    folded.insert(p);
    return cx.names.get(f, f.preds[p] + "^inv");
  };
  auto mirror = [](Hyp h) {
    if (auto* l = std::get_if<InputLiteral>(&h)) l->term.var = other(l->term.var);
    return h;
  };
  std::vector<Clause> out;
  for (auto& c : f.clauses) {
    if (c.is_false || cx.order.count(c.head) || dio_diag_init(c)) {
      out.push_back(c);
      continue;
    }
    if (auto v = init_var(c)) {
      if (*v == Var::X) {
        out.push_back(c);
      } else {
        Clause d = c;
        for (auto& h : d.hyps) h = mirror(h);
        d.head = inv(c.head);
        canon(d);
        out.push_back(d);
      }
      continue;
    }
    auto as_ = comps(c);
    if (as_.size() == 1 && pos_of(as_[0]) != Pos::SAME) {
      int S = as_[0].pred;
      switch (pos_of(as_[0])) {
        case Pos::XM1:
          out.push_back(make_clause({atom(S, tx(-1), ty()), minlit(tx(), false)}, c.head));
          out.push_back(make_clause({atom(cx.lt), atom(inv(S), tx(), ty(-1)), minlit(ty(), false)}, inv(c.head)));
          break;
        case Pos::YM1:
          out.push_back(make_clause({atom(cx.lt), atom(S, tx(), ty(-1)), minlit(ty(), false)}, c.head));
          out.push_back(make_clause({atom(inv(S), tx(-1), ty()), minlit(tx(), false)}, inv(c.head)));
          break;
        case Pos::TRANS:
          out.push_back(make_clause({atom(inv(S))}, c.head));
          out.push_back(make_clause({atom(S)}, inv(c.head)));
          break;
        default: throw Error("unexpected atom position in step 7");
      }
      continue;
    }
    // same-site clause (x=y already replaced by R_=)
    out.push_back(c);
    Clause d = c;
    for (auto& h : d.hyps)
      if (auto* a = std::get_if<CompAtom>(&h)) a->pred = inv(a->pred);
    d.head = inv(c.head);
    out.push_back(d);
  }
  for (int p : folded) {
    int q = cx.names.get(f, f.preds[p] + "^inv");
    out.push_back(make_clause({atom(cx.eq), atom(p)}, q));
    out.push_back(make_clause({atom(cx.eq), atom(q)}, p));
  }
  for (auto& c : out) canon(c);
  f.clauses = std::move(out);
  decompose(f, cx.names);
}

// Step 8: predicates whose value depends on max(y) get two versions,
// R_{<-max} (row y is the last one) and R_{<-~max}.
inline void step8(Formula& f, Ctx& cx) {
  int m = int(f.preds.size());
  std::vector<bool> dep(m, false);
  auto has_max = [](const Clause& c) {
    for (auto& h : c.hyps)
      if (auto l = as<InputLiteral>(h); l && l->kind == InKind::MAX) return true;
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& c : f.clauses) {
      if (c.is_false || dep[c.head]) continue;
      bool d = has_max(c);
      for (auto& a : comps(c)) d = d || dep[a.pred];
      if (d) dep[c.head] = changed = true;
    }
  }
  auto ver = [&](int p, bool mx) {
    if (!dep[p]) return p;
    return cx.names.get(f, f.preds[p] + (mx ? "_{<-max}" : "_{<-~max}"));
  };
  std::vector<Clause> out;
  for (auto& c : f.clauses) {
    if (c.is_false) {
      Clause d = c;
      for (auto& h : d.hyps)
        if (auto* a = std::get_if<CompAtom>(&h)) a->pred = ver(a->pred, true);
      out.push_back(d);
      continue;
    }
    if (!dep[c.head]) {
      out.push_back(c);
      continue;
    }
    for (bool mx : {true, false}) {
      Clause d = make_clause({}, ver(c.head, mx));
      bool keep = true;
      for (auto& h : c.hyps) {
        if (auto l = as<InputLiteral>(h); l && l->kind == InKind::MAX) {
          if (l->term != ty()) throw Error("max(x) outside an initialization clause after folding");
          if (l->positive != mx) keep = false;
          continue;
        }
        if (auto a = as<CompAtom>(h)) {
          Pos p = pos_of(*a);
          d.hyps.push_back(at_pos(ver(a->pred, p == Pos::YM1 ? false : mx), p));
          continue;
        }
        d.hyps.push_back(h);
      }
      if (keep) {
        canon(d);
        out.push_back(d);
      }
    }
  }
  f.clauses = std::move(out);
  for (auto& c : f.clauses)
    if (c.is_false)
      for (auto& a : comps(c)) f.bottom = a.pred;
  cx.bot = *f.bottom;
}

// Step 9: initialization clauses become input clauses.
inline void step9(Formula& f, Ctx& cx) {
  int sigma = int(f.alphabet.size());
  std::vector<Clause> out;
  int col = -1;
  auto colmark = [&]() {
    if (col < 0) {
      col = cx.names.get(f, "R^{min(x)}_{col}");
      for (int s = 0; s < sigma; ++s)
        out.push_back(make_clause({rel(Cmp::EQ), minlit(tx()), qlit(s, tx())}, col));
      out.push_back(make_clause({minlit(ty(), false), atom(col, tx(), ty(-1))}, col));
    }
    return col;
  };
  for (auto& c : f.clauses) {
    if (cx.dio && dio_diag_init(c)) {
      for (bool mn : {true, false}) {
        Clause d = c;
        d.hyps.push_back(minlit(tx(), mn));
        canon(d);
        out.push_back(d);
      }
      continue;
    }
    auto v = init_var(c);
    if (!v) {
      out.push_back(c);
      continue;
    }
    if (*v != Var::X) throw Error("row initialization clause survived folding");
    std::optional<InputLiteral> eta;
    for (auto& l : literals(c))
      if (l.term.var == Var::Y) eta = l;
    for (bool mn : {true, false}) {
      if (eta && eta->kind == InKind::MIN && eta->positive != mn) continue;
      if (eta && eta->kind == InKind::MAX) throw Error("max literal survived step 8");
      if (!cx.dio) {
        for (int s = 0; s < sigma; ++s) {
          if (eta && eta->kind == InKind::Q && eta->letter != s) continue;
          out.push_back(make_clause({minlit(tx()), minlit(ty(), mn), qlit(s, ty())}, c.head));
        }
      } else {
        if (eta && eta->kind == InKind::Q) throw Error("letter on the first column in the diagonal fragment");
        if (mn) {
          for (int s = 0; s < sigma; ++s)
            out.push_back(make_clause({rel(Cmp::EQ), minlit(tx()), qlit(s, tx())}, c.head));
        } else {
          out.push_back(make_clause({minlit(ty(), false), atom(colmark(), tx(), ty(-1))}, c.head));
        }
      }
    }
  }
  for (auto& c : out) canon(c);
  f.clauses = std::move(out);
}

// ---- step 10 ----

struct Step10Input {
  int m = 0;
  PropositionalHornProblem theta;
  std::vector<std::pair<int, Pos>> items;  // neighbour atom (pred, XM1|YM1)
  std::vector<std::vector<int>> item_heads;
  std::vector<std::array<std::vector<int>, 2>> facts;  // [letter][0: min, 1: not min] on the input line
};

inline Step10Input collect(const Formula& f, bool dio) {
  Step10Input in;
  in.m = int(f.preds.size());
  in.theta.vars = in.m;
  in.facts.resize(f.alphabet.size());
  std::map<std::pair<int, Pos>, int> idx;
  for (auto& c : f.clauses) {
    if (c.is_false) continue;
    if (!has_comp(c)) {
      int letter = -1;
      std::optional<bool> mn;
      Var line = dio ? Var::X : Var::Y;
      for (auto& l : literals(c)) {
        if (l.kind == InKind::Q) letter = l.letter;
        if (l.kind == InKind::MIN && l.term.var == line) mn = l.positive;
      }
      if (letter < 0 || !mn) throw Error("step 10 expects input clauses with a letter and a min literal");
      in.facts[letter][*mn ? 0 : 1].push_back(c.head);
      continue;
    }
    auto as_ = comps(c);
    bool neighbour = as_.size() == 1 && (pos_of(as_[0]) == Pos::XM1 || pos_of(as_[0]) == Pos::YM1);
    if (neighbour) {
      auto key = std::make_pair(as_[0].pred, pos_of(as_[0]));
      auto it = idx.find(key);
      if (it == idx.end()) {
        it = idx.emplace(key, int(in.items.size())).first;
        in.items.push_back(key);
        in.item_heads.emplace_back();
      }
      in.item_heads[it->second].push_back(c.head);
      continue;
    }
    HornClause hc;
    hc.head = c.head;
    for (auto& h : c.hyps) {
      auto a = as<CompAtom>(h);
      if (!a || pos_of(*a) != Pos::SAME) throw Error("step 10 expects one-neighbour or same-site clauses");
      hc.body.push_back(a->pred);
    }
    in.theta.clauses.push_back(hc);
  }
  return in;
}

// Supports (sets of item indices) for every head, either inclusion-minimal or
// all subsets J of the allowed items whose K_J contains the head.
inline std::vector<std::vector<Support>> supports(const Step10Input& in, const std::vector<int>& allowed,
                                                  const std::vector<int>& base, bool full, KStats* st) {
  GroupedHorn g;
  g.theta = in.theta;
  g.base = base;
  for (int i : allowed) g.group_heads.push_back(in.item_heads[i]);
  std::vector<std::vector<Support>> out(in.m);
  for (auto& [J, h] : k_clauses(g, full, st)) {
    Support t;
    for (int i : J) t.push_back(allowed[i]);
    std::sort(t.begin(), t.end());
    out[h].push_back(t);
  }
  return out;
}

inline bool dominated_by_some(const Support& s, const std::vector<Support>& pool) {
  for (auto& p : pool)
    if (std::includes(s.begin(), s.end(), p.begin(), p.end())) return true;
  return false;
}

// Step 10: no same-site hypotheses. G_h keeps the name of h and is exact
// away from the input line; C/D^{s}_h is the value on the input line if
// the letter there is s; L_s marks the input line with its letter; T is true
// everywhere and stands in for an empty support.
inline void step10(Formula& f, Ctx& cx, const NormalizeOptions& opt, bool* extension) {
  Step10Input in = collect(f, cx.dio);
  int sigma = int(f.alphabet.size());
  Formula g;
  g.logic = f.logic;
  g.alphabet = f.alphabet;
  g.preds = f.preds;  // G_h reuses index h
  Names nm;
  for (int p = 0; p < in.m; ++p) nm.by_key[f.preds[p]] = p;
  auto L = [&](int s) { return nm.get(g, "L_{" + f.alphabet[s] + "}"); };
  int T = nm.get(g, "T");
  auto C = [&](int s, int h) { return nm.get(g, f.preds[h] + "^{if:" + f.alphabet[s] + "}"); };

  std::vector<Clause>& out = g.clauses;
  auto input = [&](int s, bool mn) -> std::vector<Hyp> {
    if (cx.dio) return {rel(Cmp::EQ), minlit(tx(), mn), qlit(s, tx())};
    return {minlit(tx()), minlit(ty(), mn), qlit(s, ty())};
  };
  auto nb = [&](int p, Pos side) -> std::vector<Hyp> {
    if (side == Pos::XM1) return {atom(p, tx(-1), ty()), minlit(tx(), false)};
    return {atom(p, tx(), ty(-1)), minlit(ty(), false)};
  };
  auto cat = [](std::vector<Hyp> a, const std::vector<Hyp>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };

  for (int s = 0; s < sigma; ++s)
    for (bool mn : {true, false}) {
      out.push_back(make_clause(input(s, mn), L(s)));
      out.push_back(make_clause(input(s, mn), T));
    }
  out.push_back(make_clause(nb(T, Pos::XM1), T));
  if (cx.dio) out.push_back(make_clause(nb(T, Pos::YM1), T));

  // first site of the input line
  for (int s = 0; s < sigma; ++s)
    for (int h : closure_set(in.theta, in.facts[s][0])) {
      out.push_back(make_clause(input(s, true), h));
      out.push_back(make_clause(input(s, true), C(s, h)));
    }

  std::vector<int> all, only_b;
  for (int i = 0; i < int(in.items.size()); ++i) {
    all.push_back(i);
    if (in.items[i].second == Pos::YM1) only_b.push_back(i);
  }

  // the rest of the input line
  std::vector<std::vector<std::vector<Support>>> line_sup(sigma);
  for (int s = 0; s < sigma; ++s) {
    auto sup = supports(in, cx.dio ? all : only_b, in.facts[s][1], opt.full_subsets, &cx.kstats);
    line_sup[s] = sup;
    for (int h = 0; h < in.m; ++h)
      for (auto& S : sup[h]) {
        // the letter alone decides h here, which an input clause can say directly
        if (S.empty()) out.push_back(make_clause(input(s, false), h));
        if (cx.dio) {
          // neighbours of a diagonal site are off the diagonal: G values
          std::vector<Hyp> body;
          for (int i : S) body = cat(body, nb(in.items[i].first, in.items[i].second));
          if (S.empty()) body = nb(T, Pos::XM1);
          out.push_back(make_clause(body, C(s, h)));
        } else {
          // the previous site is on the input line too: guess its letter
          for (int t = 0; t < sigma; ++t) {
            std::vector<Hyp> body = nb(L(t), Pos::YM1);
            for (int i : S) body = cat(body, nb(C(t, in.items[i].first), Pos::YM1));
            out.push_back(make_clause(body, C(s, h)));
          }
        }
      }
  }

  // away from the input line
  auto sup = supports(in, all, {}, opt.full_subsets, &cx.kstats);
  for (int h = 0; h < in.m; ++h)
    for (auto& S : sup[h]) {
      if (S.empty()) {
        out.push_back(make_clause(nb(T, Pos::XM1), h));
        if (cx.dio) out.push_back(make_clause(nb(T, Pos::YM1), h));
        continue;
      }
      bool has_a = false, has_b = false;
      for (int i : S) (in.items[i].second == Pos::XM1 ? has_a : has_b) = true;
      // mode -1 reads G; mode s reads the input-line guess for letter s
      for (int am = -1; am < (has_a ? sigma : 0); ++am)
        for (int bm = -1; bm < (cx.dio && has_b ? sigma : 0); ++bm) {
          if (am >= 0 && bm >= 0) continue;
          std::vector<Hyp> body;
          if (am >= 0) body = cat(body, nb(L(am), Pos::XM1));
          if (bm >= 0) body = cat(body, nb(L(bm), Pos::YM1));
          for (int i : S) {
            auto [p, side] = in.items[i];
            int mode = side == Pos::XM1 ? am : bm;
            body = cat(body, nb(mode >= 0 ? C(mode, p) : p, side));
          }
          out.push_back(make_clause(body, h));
        }
    }

  // the output site (n,n) lies on the input line in the diagonal fragment
  if (cx.dio) {
    auto& root = sup[cx.bot];
    for (int s = 0; s < sigma; ++s) {
      bool exact = true;
      for (auto& S : line_sup[s][cx.bot]) exact = exact && (S.empty() || dominated_by_some(S, root));
      if (exact) continue;
      *extension = true;
      out.push_back(make_clause({rel(Cmp::EQ), minlit(tx(), false), qlit(s, tx()), atom(C(s, cx.bot))}, cx.bot));
    }
  }

  out.push_back(make_false({maxlit(tx()), maxlit(ty()), atom(cx.bot)}));
  for (auto& c : out) canon(c);
  g.bottom = cx.bot;
  f = std::move(g);
}

}  // namespace pred_steps

inline NormalizeResult normalize_pred_like(const Formula& input, const NormalizeOptions& opt = {}) {
  using namespace pred_steps;
  if (input.logic == Logic::INCL) throw Error("inclusion formula given to the predecessor normalizer");
  NormalizeResult res;
  Formula f = input;
  validate_or_throw(f);
  Ctx cx;
  cx.dio = f.logic == Logic::PRED_DIO;

  auto run = [&](int k, auto&& fn) {
    if (opt.stop_after && k > opt.stop_after) return false;
    int before = int(f.preds.size());
    fn();
    record(res.trace, "step" + std::to_string(k), f, before);
    return true;
  };
  bool go = run(1, [&] { step1(f, cx); }) && run(2, [&] { step2(f, cx); }) && run(3, [&] { step3(f, cx); }) &&
            run(4, [&] { step4(f, cx); }) && run(5, [&] { step5(f, cx); }) && run(6, [&] { step6(f, cx); }) &&
            run(7, [&] { step7(f, cx); }) && run(8, [&] { step8(f, cx); }) && run(9, [&] { step9(f, cx); }) &&
            run(10, [&] {
              step10(f, cx, opt, &res.extension);
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

inline Formula normalize_pred(const Formula& f, const NormalizeOptions& opt = {}) {
  if (f.logic != Logic::PRED) throw Error("normalize_pred expects a pred formula");
  return normalize_pred_like(f, opt).formula;
}

inline Formula normalize_pred_dio(const Formula& f, const NormalizeOptions& opt = {}) {
  if (f.logic != Logic::PRED_DIO) throw Error("normalize_pred_dio expects a pred-dio formula");
  return normalize_pred_like(f, opt).formula;
}

}  // namespace hornlab
