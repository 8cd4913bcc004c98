// Plumbing shared by the two normalizers: fresh names, clause surgery,
// decomposition into one-neighbour clauses, pruning, traces and the
// normal-form checker.
#pragma once

#include <functional>
#include <map>
#include <set>

#include "horn.hpp"
#include "text.hpp"

namespace hornlab {

struct TraceStep {
  std::string name;
  Formula formula;
  int preds = 0, clauses = 0;
  std::vector<std::string> new_preds;
};

struct NormalizeOptions {
  int stop_after = 0;         // 0 runs every step
  bool full_subsets = false;  // emit all 2^k group subsets in the last step instead of minimal ones
  bool prune = true;
};

struct NormalizeResult {
  Formula formula;
  std::vector<TraceStep> trace;
  bool extension = false;  // diagonal fragment needed the letter-guarded contradiction feed
  KStats kstats;
};

// ---- names ----

// Generated names live in braces so they never clash with user identifiers
// that could be typed without them; clashes get primes anyway.
struct Names {
  std::map<std::string, int> by_key;
  int aux = 0;

  int get(Formula& f, const std::string& key, bool* created = nullptr) {
    auto it = by_key.find(key);
    if (it != by_key.end()) {
      if (created) *created = false;
      return it->second;
    }
    std::string name = key;
    while (f.pred_index(name) >= 0) name += "'";
    f.preds.push_back(name);
    int id = int(f.preds.size()) - 1;
    by_key[key] = id;
    if (created) *created = true;
    return id;
  }
  int fresh(Formula& f, const std::string& base) { return get(f, base + std::to_string(++aux)); }
};

// ---- atom positions in the predecessor shapes ----

enum class Pos { SAME, XM1, YM1, TRANS, OTHER };

inline Pos pos_of(const CompAtom& a) {
  if (a.a1.var == Var::X && a.a2.var == Var::Y) {
    if (a.a1.offset == 0 && a.a2.offset == 0) return Pos::SAME;
    if (a.a1.offset == -1 && a.a2.offset == 0) return Pos::XM1;
    if (a.a1.offset == 0 && a.a2.offset == -1) return Pos::YM1;
  }
  if (a.a1.var == Var::Y && a.a2.var == Var::X && a.a1.offset == 0 && a.a2.offset == 0) return Pos::TRANS;
  return Pos::OTHER;
}

inline Hyp at_pos(int p, Pos pos) {
  switch (pos) {
    case Pos::XM1: return atom(p, tx(-1), ty());
    case Pos::YM1: return atom(p, tx(), ty(-1));
    case Pos::TRANS: return atom(p, ty(), tx());
    default: return atom(p);
  }
}

inline bool is_lit(const Hyp& h, InKind k, bool pos, Var v, int off = 0) {
  auto l = as<InputLiteral>(h);
  return l && l->kind == k && l->positive == pos && l->term.var == v && l->term.offset == off;
}

inline bool has_lit(const Clause& c, InKind k, bool pos, Var v) {
  for (auto& h : c.hyps)
    if (is_lit(h, k, pos, v)) return true;
  return false;
}

inline bool is_eq(const Hyp& h) {
  auto a = as<ArithAtom>(h);
  return a && a->kind == ArithAtom::Kind::Rel && a->op == Cmp::EQ && a->k == 0;
}

inline std::vector<InputLiteral> literals(const Clause& c) {
  std::vector<InputLiteral> out;
  for (auto& h : c.hyps)
    if (auto l = as<InputLiteral>(h)) out.push_back(*l);
  return out;
}

inline std::vector<CompAtom> comps(const Clause& c) {
  std::vector<CompAtom> out;
  for (auto& h : c.hyps)
    if (auto a = as<CompAtom>(h)) out.push_back(*a);
  return out;
}

inline bool has_eq_atom(const Clause& c) {
  for (auto& h : c.hyps)
    if (is_eq(h)) return true;
  return false;
}

// literals first, comparisons, letters, then atoms
inline int hyp_rank(const Hyp& h) {
  if (as<ArithAtom>(h)) return 0;
  if (auto l = as<InputLiteral>(h)) return l->kind == InKind::Q ? 2 : 1;
  return 3;
}

inline void canon(Clause& c) {
  std::stable_sort(c.hyps.begin(), c.hyps.end(), [](const Hyp& a, const Hyp& b) {
    int ra = hyp_rank(a), rb = hyp_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
  });
  c.hyps.erase(std::unique(c.hyps.begin(), c.hyps.end()), c.hyps.end());
}

inline std::string lit_key(const InputLiteral& l) {
  std::string s = l.positive ? "" : "~";
  s += l.kind == InKind::MIN ? "min" : "max";
  return s + "(" + var_name(l.term.var) + ")";
}

// ---- decomposition into one-neighbour and same-site clauses ----

// A clause whose hypotheses are neighbour atoms (each with its ¬min), same-site
// atoms, transposed atoms and (diagonal fragment) x=y is split so that every
// neighbour or transposed atom sits alone in a clause of its own.
inline void decompose(Formula& f, Names& names) {
  std::vector<Clause> out;
  for (auto& c : f.clauses) {
    if (c.is_false || !has_comp(c)) {
      out.push_back(c);
      continue;
    }
    std::vector<Hyp> items, same;
    bool other_lit = false;
    for (auto& h : c.hyps) {
      if (auto a = as<CompAtom>(h)) {
        Pos p = pos_of(*a);
        if (p == Pos::SAME) same.push_back(h);
        else items.push_back(h);
      } else if (is_eq(h)) {
        same.push_back(h);
      } else if (!(is_lit(h, InKind::MIN, false, Var::X) || is_lit(h, InKind::MIN, false, Var::Y))) {
        other_lit = true;
      }
    }
    if (other_lit || (items.size() == 1 && same.empty()) || items.empty()) {
      out.push_back(c);
      continue;
    }
    std::vector<Hyp> body = same;
    for (auto& it : items) {
      auto a = *as<CompAtom>(it);
      Pos p = pos_of(a);
      int aux = names.fresh(f, "Aux");
      Clause d;
      d.head = aux;
      d.hyps.push_back(it);
      if (p == Pos::XM1) d.hyps.push_back(minlit(tx(), false));
      if (p == Pos::YM1) d.hyps.push_back(minlit(ty(), false));
      canon(d);
      out.push_back(d);
      body.push_back(atom(aux));
    }
    Clause r = make_clause(body, c.head);
    canon(r);
    out.push_back(r);
  }
  f.clauses = std::move(out);
}

// ---- pruning ----

// Drops clauses that can never fire, predicates that cannot reach the
// contradiction, duplicates and clauses subsumed by a smaller one with the
// same conclusion; then renumbers predicates with R_bot first.
inline void prune_once(Formula& f) {
  int m = int(f.preds.size());
  for (auto& c : f.clauses) canon(c);

  std::vector<bool> derivable(m, false);
  bool changed = true;
  auto body_ok = [&](const Clause& c) {
    for (auto& h : c.hyps)
      if (auto a = as<CompAtom>(h); a && !derivable[a->pred]) return false;
    return true;
  };
  while (changed) {
    changed = false;
    for (auto& c : f.clauses)
      if (!c.is_false && !derivable[c.head] && body_ok(c)) derivable[c.head] = changed = true;
  }
  std::vector<Clause> live;
  for (auto& c : f.clauses)
    if (c.is_false || body_ok(c)) live.push_back(c);  // the contradiction clause stays even if dead

  std::vector<bool> needed(m, false);
  std::vector<int> stack;
  auto need = [&](int p) {
    if (!needed[p]) {
      needed[p] = true;
      stack.push_back(p);
    }
  };
  if (f.bottom) need(*f.bottom);
  for (auto& c : live)
    if (c.is_false)
      for (auto& a : comps(c)) need(a.pred);
  std::vector<std::vector<int>> by_head(m);
  for (int i = 0; i < int(live.size()); ++i)
    if (!live[i].is_false) by_head[live[i].head].push_back(i);
  while (!stack.empty()) {
    int p = stack.back();
    stack.pop_back();
    for (int i : by_head[p])
      for (auto& a : comps(live[i])) need(a.pred);
  }

  std::vector<Clause> kept;
  std::set<std::pair<int, std::vector<Hyp>>> seen;
  for (auto& c : live) {
    if (!c.is_false && !needed[c.head]) continue;
    if (!seen.insert({c.is_false ? -1 : c.head, c.hyps}).second) continue;
    kept.push_back(c);
  }
  // subsumption within one head
  std::vector<bool> drop(kept.size(), false);
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < int(kept.size()); ++i) groups[kept[i].is_false ? -1 : kept[i].head].push_back(i);
  for (auto& [h, ids] : groups)
    for (int i : ids)
      for (int j : ids) {
        if (i == j || drop[i] || drop[j]) continue;
        auto& a = kept[i].hyps;
        auto& b = kept[j].hyps;
        if (a.size() < b.size() && std::all_of(a.begin(), a.end(), [&](const Hyp& x) {
              return std::find(b.begin(), b.end(), x) != b.end();
            }))
          drop[j] = true;
      }
  std::vector<Clause> final_clauses;
  for (int i = 0; i < int(kept.size()); ++i)
    if (!drop[i]) final_clauses.push_back(kept[i]);

  // renumber: bottom first, then by first use
  std::vector<int> remap(m, -1);
  std::vector<std::string> names;
  auto take = [&](int p) {
    if (remap[p] < 0) {
      remap[p] = int(names.size());
      names.push_back(f.preds[p]);
    }
  };
  if (f.bottom) take(*f.bottom);
  for (auto& c : final_clauses) {
    if (!c.is_false) take(c.head);
    for (auto& a : comps(c)) take(a.pred);
  }
  for (auto& c : final_clauses) {
    if (!c.is_false) c.head = remap[c.head];
    for (auto& h : c.hyps)
      if (auto* a = std::get_if<CompAtom>(&h)) a->pred = remap[a->pred];
    canon(c);
  }
  if (f.bottom) f.bottom = remap[*f.bottom];
  f.preds = names;
  f.clauses = std::move(final_clauses);
}

// Coarsest partition of the predicates in which all members of a class are
// derived by the same clause bodies, read modulo the partition. Members of a
// class then hold on exactly the same sites, so each class is collapsed onto
// its first member. R_bot keeps a class of its own. Returns false when every
// class is a singleton.
inline bool merge_equivalent(Formula& f) {
  int m = int(f.preds.size());
  std::vector<int> cls(m, 0);
  if (f.bottom) cls[*f.bottom] = 1;
  auto body_key = [&](const Clause& c) {
    std::vector<Hyp> h = c.hyps;
    for (auto& x : h)
      if (auto* a = std::get_if<CompAtom>(&x)) a->pred = cls[a->pred];
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    return h;
  };
  for (int classes = f.bottom ? 2 : 1;;) {
    std::vector<std::set<std::vector<Hyp>>> sig(m);
    for (auto& c : f.clauses)
      if (!c.is_false) sig[c.head].insert(body_key(c));
    std::map<std::pair<int, std::set<std::vector<Hyp>>>, int> ids;
    std::vector<int> next(m);
    for (int p = 0; p < m; ++p) next[p] = ids.emplace(std::pair{cls[p], sig[p]}, int(ids.size())).first->second;
    cls = next;
    if (int(ids.size()) == classes) break;
    classes = int(ids.size());
  }
  std::vector<int> rep(m, -1);
  std::map<int, int> first;
  bool merged = false;
  for (int p = 0; p < m; ++p) {
    bool fresh = first.emplace(cls[p], p).second;
    merged = merged || !fresh;
  }
  if (!merged) return false;
  for (int p = 0; p < m; ++p) rep[p] = first[cls[p]];
  for (auto& c : f.clauses) {
    if (!c.is_false) c.head = rep[c.head];
    for (auto& h : c.hyps)
      if (auto* a = std::get_if<CompAtom>(&h)) a->pred = rep[a->pred];
    canon(c);
  }
  return true;
}

inline void prune(Formula& f) {
  do prune_once(f);
  while (merge_equivalent(f));
}

// ---- normal form checker ----

struct NormalFormReport {
  bool normal = true;
  std::vector<std::pair<int, std::string>> offenses;  // clause index, reason
  std::vector<int> extensions;                       // accepted letter-guarded diagonal clauses
};

namespace detail {

inline bool pred_input_shape(const Clause& c) {
  if (has_comp(c) || c.hyps.size() != 3) return false;
  int mx = 0, my = 0, q = 0;
  for (auto& h : c.hyps) {
    if (is_lit(h, InKind::MIN, true, Var::X)) ++mx;
    else if (is_lit(h, InKind::MIN, true, Var::Y) || is_lit(h, InKind::MIN, false, Var::Y)) ++my;
    else if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q && l->positive && l->term == ty()) ++q;
  }
  return mx == 1 && my == 1 && q == 1;
}

inline bool dio_input_shape(const Clause& c) {
  if (has_comp(c) || c.hyps.size() != 3) return false;
  int eq = 0, mx = 0, q = 0;
  for (auto& h : c.hyps) {
    if (is_eq(h)) ++eq;
    else if (is_lit(h, InKind::MIN, true, Var::X) || is_lit(h, InKind::MIN, false, Var::X)) ++mx;
    else if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q && l->positive && l->term == tx()) ++q;
  }
  return eq == 1 && mx == 1 && q == 1;
}

inline bool dio_extension_shape(const Clause& c) {
  if (c.is_false || c.hyps.size() != 4) return false;
  int eq = 0, nm = 0, q = 0, a = 0;
  for (auto& h : c.hyps) {
    if (is_eq(h)) ++eq;
    else if (is_lit(h, InKind::MIN, false, Var::X)) ++nm;
    else if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q && l->positive && l->term == tx()) ++q;
    else if (auto p = as<CompAtom>(h); p && pos_of(*p) == Pos::SAME) ++a;
  }
  return eq == 1 && nm == 1 && q == 1 && a == 1;
}

inline bool pred_computation_shape(const Clause& c) {
  bool ax = false, ay = false, nx = false, ny = false;
  for (auto& h : c.hyps) {
    if (auto a = as<CompAtom>(h)) {
      Pos p = pos_of(*a);
      if (p == Pos::XM1) ax = true;
      else if (p == Pos::YM1) ay = true;
      else return false;
    } else if (is_lit(h, InKind::MIN, false, Var::X)) {
      nx = true;
    } else if (is_lit(h, InKind::MIN, false, Var::Y)) {
      ny = true;
    } else {
      return false;
    }
  }
  return (ax || ay) && ax == nx && ay == ny;
}

inline bool incl_computation_shape(const Clause& c) {
  bool lt = false, any = false;
  for (auto& h : c.hyps) {
    if (auto r = as<ArithAtom>(h)) {
      if (!(r->kind == ArithAtom::Kind::Rel && r->op == Cmp::LT && r->k == 0) || lt) return false;
      lt = true;
    } else if (auto a = as<CompAtom>(h)) {
      bool right = a->a1 == tx(1) && a->a2 == ty();
      bool down = a->a1 == tx() && a->a2 == ty(-1);
      if (!right && !down) return false;
      any = true;
    } else {
      return false;
    }
  }
  return lt && any;
}

}  // namespace detail

inline NormalFormReport is_normal(const Formula& f) {
  using namespace detail;
  NormalFormReport r;
  int contradictions = 0;
  // a parsed formula may not name its bottom; then the contradiction clause does
  std::optional<int> bottom = f.bottom;
  if (!bottom)
    for (auto& c : f.clauses)
      if (c.is_false)
        for (auto& a : comps(c)) bottom = a.pred;
  auto bad = [&](int i, const std::string& why) {
    r.normal = false;
    r.offenses.push_back({i, why});
  };
  for (int i = 0; i < int(f.clauses.size()); ++i) {
    const Clause& c = f.clauses[i];
    if (c.is_false) {
      ++contradictions;
      bool ok = c.hyps.size() == 3;
      int seen = 0;
      for (auto& h : c.hyps) {
        if (auto a = as<CompAtom>(h)) {
          ok = ok && pos_of(*a) == Pos::SAME && bottom && a->pred == *bottom;
          ++seen;
        } else if (f.logic == Logic::INCL) {
          ok = ok && (is_lit(h, InKind::MIN, true, Var::X) || is_lit(h, InKind::MAX, true, Var::Y));
        } else {
          ok = ok && (is_lit(h, InKind::MAX, true, Var::X) || is_lit(h, InKind::MAX, true, Var::Y));
        }
      }
      if (!ok || seen != 1) bad(i, "contradiction clause has the wrong shape");
      continue;
    }
    switch (f.logic) {
      case Logic::PRED:
        if (!pred_input_shape(c) && !pred_computation_shape(c)) bad(i, "neither an input nor a computation clause");
        break;
      case Logic::PRED_DIO:
        if (dio_extension_shape(c)) r.extensions.push_back(i);
        else if (!dio_input_shape(c) && !pred_computation_shape(c))
          bad(i, "neither an input nor a computation clause");
        break;
      case Logic::INCL: {
        bool input = !has_comp(c) && c.hyps.size() == 2 && is_eq(c.hyps[0]) + is_eq(c.hyps[1]) == 1;
        if (input) {
          auto l = as<InputLiteral>(is_eq(c.hyps[0]) ? c.hyps[1] : c.hyps[0]);
          input = l && l->kind == InKind::Q && l->positive && l->term == tx();
        }
        if (!input && !incl_computation_shape(c)) bad(i, "neither an input nor a computation clause");
        break;
      }
    }
  }
  if (contradictions != 1) bad(-1, std::to_string(contradictions) + " contradiction clauses, expected exactly one");
  return r;
}

// ---- trace helpers ----

inline void record(std::vector<TraceStep>& trace, const std::string& name, const Formula& f, int preds_before) {
  TraceStep s;
  s.name = name;
  s.formula = f;
  s.preds = int(f.preds.size());
  s.clauses = int(f.clauses.size());
  for (int i = preds_before; i < s.preds; ++i) s.new_preds.push_back(f.preds[i]);
  trace.push_back(std::move(s));
}

}  // namespace hornlab
