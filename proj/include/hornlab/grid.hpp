// Grid circuits. Every site (x,y) holds one bit per predicate and is computed
// from its two predecessor sites, the letter injected there (if any) and the
// border flags. GRID1 takes PRED normal forms (letters on the column x=1,
// output (n,n)), GRID2 takes INCL (letters on x=y, output (1,n)) and GRID3
// takes PRED-DIO (letters on x=y, output (n,n)).
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "normalize_common.hpp"

namespace hornlab {

enum class GridKind { GRID1, GRID2, GRID3 };

inline const char* grid_kind_name(GridKind k) {
  switch (k) {
    case GridKind::GRID1: return "grid1";
    case GridKind::GRID2: return "grid2";
    case GridKind::GRID3: return "grid3";
  }
  return "?";
}

inline GridKind grid_kind_for(Logic l) {
  switch (l) {
    case Logic::PRED: return GridKind::GRID1;
    case Logic::INCL: return GridKind::GRID2;
    default: return GridKind::GRID3;
  }
}

using Bits = std::string;  // '0'/'1' per predicate, bit 0 is R_bot

// What a site sees. prev_x is (x-1,y) for GRID1/3 and (x+1,y) for GRID2;
// prev_y is (x,y-1). Null means the predecessor is outside the domain.
struct SiteIn {
  const Bits* prev_x = nullptr;
  const Bits* prev_y = nullptr;
  int letter = -1;
  bool min_x = false, min_y = false, diag = false;
};

struct GridCircuit {
  GridKind kind = GridKind::GRID1;
  Formula formula;  // normal, predicates renumbered so that R_bot is 0
  int m = 0;

  struct Code {
    std::vector<int> px, py, same;
    int letter = -1;
    int8_t min_x = -1, min_y = -1, diag = -1;  // -1: no condition
    int head = 0;
    int clause = -1;  // index in formula.clauses
  };
  std::vector<Code> plain, with_same;  // with_same: needs the site's own bits (diagonal extension)

  // fired, when given, collects the indices of the clauses whose body held
  Bits local(const SiteIn& in, std::vector<int>* fired = nullptr) const {
    Bits b(m, '0');
    auto holds = [&](const Code& c) {
      if (c.letter >= 0 && c.letter != in.letter) return false;
      if (c.min_x >= 0 && bool(c.min_x) != in.min_x) return false;
      if (c.min_y >= 0 && bool(c.min_y) != in.min_y) return false;
      if (c.diag >= 0 && bool(c.diag) != in.diag) return false;
      if (!c.px.empty() && !in.prev_x) return false;
      if (!c.py.empty() && !in.prev_y) return false;
      for (int p : c.px)
        if ((*in.prev_x)[p] != '1') return false;
      for (int p : c.py)
        if ((*in.prev_y)[p] != '1') return false;
      for (int p : c.same)
        if (b[p] != '1') return false;
      return true;
    };
    for (auto& c : plain)
      if (holds(c)) {
        b[c.head] = '1';
        if (fired) fired->push_back(c.clause);
      }
    for (bool changed = !with_same.empty(); changed;) {
      changed = false;
      for (auto& c : with_same)
        if (b[c.head] != '1' && holds(c)) {
          b[c.head] = '1';
          changed = true;
        }
    }
    if (fired)
      for (auto& c : with_same)
        if (holds(c)) fired->push_back(c.clause);
    return b;
  }
};

// Moves R_bot to index 0 and keeps the other predicates in order.
inline Formula bottom_first(const Formula& f) {
  std::optional<int> bot = f.bottom;
  if (!bot)
    for (auto& c : f.clauses)
      if (c.is_false)
        for (auto& a : comps(c)) bot = a.pred;
  if (!bot) throw Error("formula has no contradiction clause");
  if (*bot == 0) {
    Formula g = f;
    g.bottom = 0;
    return g;
  }
  int m = int(f.preds.size());
  std::vector<int> to(m);
  Formula g = f;
  g.preds.clear();
  g.preds.push_back(f.preds[*bot]);
  for (int i = 0, k = 1; i < m; ++i) {
    if (i == *bot) to[i] = 0;
    else {
      to[i] = k++;
      g.preds.push_back(f.preds[i]);
    }
  }
  for (auto& c : g.clauses) {
    if (!c.is_false) c.head = to[c.head];
    for (auto& h : c.hyps)
      if (auto* a = std::get_if<CompAtom>(&h)) a->pred = to[a->pred];
  }
  g.bottom = 0;
  return g;
}

inline GridCircuit compile_grid(const Formula& input) {
  auto rep = is_normal(input);
  if (!rep.normal) {
    std::string why = rep.offenses.empty() ? "" : ": " + rep.offenses[0].second;
    throw Error("compile_grid needs a normal formula" + why);
  }
  GridCircuit g;
  g.kind = grid_kind_for(input.logic);
  g.formula = bottom_first(input);
  g.m = int(g.formula.preds.size());
  bool incl = g.kind == GridKind::GRID2;
  for (int ci = 0; ci < int(g.formula.clauses.size()); ++ci) {
    const Clause& c = g.formula.clauses[ci];
    if (c.is_false) continue;
    GridCircuit::Code k;
    k.head = c.head;
    k.clause = ci;
    for (auto& h : c.hyps) {
      if (auto a = as<CompAtom>(h)) {
        if (incl ? a->a1 == tx(1) && a->a2 == ty() : pos_of(*a) == Pos::XM1) k.px.push_back(a->pred);
        else if (a->a1 == tx() && a->a2 == ty(-1)) k.py.push_back(a->pred);
        else if (pos_of(*a) == Pos::SAME) k.same.push_back(a->pred);
        else throw Error("atom position not supported by the grid");
      } else if (auto l = as<InputLiteral>(h)) {
        if (l->kind == InKind::Q) k.letter = l->letter;
        else if (l->kind == InKind::MIN && l->term.offset == 0)
          (l->term.var == Var::X ? k.min_x : k.min_y) = l->positive;
        else throw Error("literal not supported by the grid");
      } else if (auto r = as<ArithAtom>(h)) {
        if (r->kind != ArithAtom::Kind::Rel || r->k != 0) throw Error("comparison not supported by the grid");
        if (r->op == Cmp::EQ) k.diag = 1;
        else if (r->op == Cmp::LT) k.diag = 0;
        else if (r->op != Cmp::LE) throw Error("comparison not supported by the grid");
      }
    }
    (k.same.empty() ? g.plain : g.with_same).push_back(k);
  }
  return g;
}

struct GridRun {
  int n = 0;
  std::vector<Bits> sites;  // (x-1)*n + (y-1); empty outside the domain
  bool accepted = false;
  const Bits& at(int x, int y) const { return sites[size_t(x - 1) * n + (y - 1)]; }
  Bits& at(int x, int y) { return sites[size_t(x - 1) * n + (y - 1)]; }
};

inline std::pair<int, int> grid_output(GridKind k, int n) {
  return k == GridKind::GRID2 ? std::pair{1, n} : std::pair{n, n};
}

inline GridRun run_grid(const GridCircuit& g, const Word& w) {
  int n = int(w.size());
  if (n == 0) throw Error("empty word");
  for (int s : w)
    if (s < 0 || s >= int(g.formula.alphabet.size())) throw Error("letter outside the alphabet");
  GridRun r;
  r.n = n;
  r.sites.assign(size_t(n) * n, "");
  if (g.kind == GridKind::GRID2) {
    for (int x = n; x >= 1; --x)
      for (int y = x; y <= n; ++y) {
        SiteIn in;
        if (x + 1 <= y) in.prev_x = &r.at(x + 1, y);
        if (y - 1 >= x) in.prev_y = &r.at(x, y - 1);
        in.diag = x == y;
        if (in.diag) in.letter = w[x - 1];
        in.min_x = x == 1;
        in.min_y = y == 1;
        r.at(x, y) = g.local(in);
      }
  } else {
    for (int y = 1; y <= n; ++y)
      for (int x = 1; x <= n; ++x) {
        SiteIn in;
        if (x > 1) in.prev_x = &r.at(x - 1, y);
        if (y > 1) in.prev_y = &r.at(x, y - 1);
        in.min_x = x == 1;
        in.min_y = y == 1;
        in.diag = x == y;
        if (g.kind == GridKind::GRID1 ? x == 1 : x == y) in.letter = w[(g.kind == GridKind::GRID1 ? y : x) - 1];
        r.at(x, y) = g.local(in);
      }
  }
  auto [ox, oy] = grid_output(g.kind, n);
  r.accepted = r.at(ox, oy)[0] == '0';
  return r;
}

// Over-approximates the site states of every run, and records which clauses
// fire together at each site context met (nullopt when the pair set outgrows
// the cap).
// Sites are chained along the lines the circuit fills one after another:
// anti-diagonals x+y=d for GRID1/GRID3, diagonals y-x=l for GRID2. Each site
// of the next line is computed from two adjacent sites of the current one,
// so tracking which adjacent pairs occur, and joining them into triples,
// keeps the correlation between a site's two neighbours. Every state carries
// the tag that fixes its context: the sign of x-y, or for GRID2 whether x=1.
// Site values never depend on max literals, so the infinite quadrant with
// arbitrary letters covers every finite run.
struct SiteReach {
  std::vector<bool> live;                   // fires somewhere
  std::set<std::vector<int>> fired_together;  // clause sets firing at one site
};

inline std::optional<SiteReach> site_reach(const GridCircuit& g, size_t cap = size_t(1) << 15) {
  int sigma = int(g.formula.alphabet.size());
  SiteReach out;
  out.live.assign(g.formula.clauses.size(), false);
  std::map<std::pair<Bits, int>, int> ids;
  std::vector<std::pair<Bits, int>> nodes{{"", -1}, {"", -1}};  // 0, 1: the line ends
  constexpr int BEGIN = 0, END = 1;
  auto intern = [&](Bits b, int tag) {
    auto [it, fresh] = ids.emplace(std::pair{b, tag}, int(nodes.size()));
    if (fresh) nodes.push_back({std::move(b), tag});
    return it->second;
  };
  auto site = [&](const Bits* px, const Bits* py, int letter, bool mx, bool my, bool diag) {
    SiteIn in;
    in.prev_x = px, in.prev_y = py, in.letter = letter, in.min_x = mx, in.min_y = my, in.diag = diag;
    std::vector<int> fired;
    Bits b = g.local(in, &fired);
    std::sort(fired.begin(), fired.end());
    for (int c : fired) out.live[c] = true;
    out.fired_together.insert(std::move(fired));
    return b;
  };
  std::set<std::pair<int, int>> pairs;
  bool incl = g.kind == GridKind::GRID2;
  enum { LT, EQ, GT };

  // the sites computed from left neighbour a and lower neighbour b, one per letter when lettered
  auto eval = [&](int a, int b) {
    std::vector<int> out;
    if (incl) {
      // a = (x,y-1), b = (x+1,y)
      bool first = nodes[a].second;
      Bits b2 = site(&nodes[b].first, &nodes[a].first, -1, first, false, false);
      out.push_back(intern(std::move(b2), first));
      return out;
    }
    bool mx = a == BEGIN, my = b == END;
    int tag;
    if (mx && my) tag = EQ;
    else if (mx) tag = LT;
    else if (my) tag = GT;
    else {
      int ta = nodes[a].second, tb = nodes[b].second;
      tag = ta == EQ ? GT : tb == EQ ? LT : ta == LT && tb == GT ? EQ : ta;
    }
    bool lettered = g.kind == GridKind::GRID1 ? mx : tag == EQ;
    Bits ba = nodes[a].first, bb = nodes[b].first;  // intern may move nodes
    for (int s = lettered ? 0 : -1; s < (lettered ? sigma : 0); ++s)
      out.push_back(intern(site(mx ? nullptr : &ba, my ? nullptr : &bb, s, mx, my, tag == EQ), tag));
    return out;
  };

  std::map<std::pair<int, int>, std::vector<int>> memo;
  auto eval_m = [&](int a, int b) -> const std::vector<int>& {
    auto it = memo.find({a, b});
    if (it == memo.end()) it = memo.emplace(std::pair{a, b}, eval(a, b)).first;
    return it->second;
  };
  // semi-naive: each new pair is joined with the pairs already known
  std::map<int, std::vector<int>> succ, pred;
  std::vector<std::pair<int, int>> work;
  auto add = [&](int a, int b) {
    if (pairs.insert({a, b}).second) {
      succ[a].push_back(b);
      pred[b].push_back(a);
      work.push_back({a, b});
    }
  };
  auto product = [&](const std::vector<int>& left, const std::vector<int>& right) {
    for (int l : left)
      for (int r : right) add(l, r);
  };
  if (incl) {
    for (int s = 0; s < sigma; ++s)
      for (int t = 0; t < sigma; ++t) {
        int first = intern(site(nullptr, nullptr, s, true, true, true), 1);
        int other = intern(site(nullptr, nullptr, s, false, false, true), 0);
        int next = intern(site(nullptr, nullptr, t, false, false, true), 0);
        add(first, next);
        add(other, next);
      }
  } else {
    for (int n : eval(BEGIN, END)) {
      add(BEGIN, n);
      add(n, END);
    }
  }
  while (!work.empty()) {
    if (pairs.size() > cap) return std::nullopt;
    auto [a, b] = work.back();
    work.pop_back();
    if (b == END) {
      if (a != BEGIN)
        for (int r : std::vector<int>(eval_m(a, END))) add(r, END);
    } else {
      std::vector<int> left = eval_m(a, b);
      if (a == BEGIN && !incl)
        for (int l : left) add(BEGIN, l);
      for (size_t i = 0; i < succ[b].size(); ++i) {
        int c = succ[b][i];
        product(left, std::vector<int>(eval_m(b, c)));
      }
    }
    // (a,b) as the right half of a triple (q,a,b)
    for (size_t i = 0; i < pred[a].size(); ++i)
      product(std::vector<int>(eval_m(pred[a][i], a)), std::vector<int>(eval_m(a, b)));
  }
  return out;
}

// Removes computation clauses that fire on no word, then, one at a time,
// those whose head is always derived by another plain clause wherever they
// fire. Either way every reachable site computes the same bits as before.
inline bool drop_unneeded_clauses(Formula& f) {
  GridCircuit g = compile_grid(f);
  auto reach = site_reach(g);
  if (!reach) return false;
  int nc = int(g.formula.clauses.size());
  std::vector<bool> keep(nc), plain(nc, false);
  for (int i = 0; i < nc; ++i) keep[i] = g.formula.clauses[i].is_false || reach->live[i];
  for (auto& c : g.plain) plain[c.clause] = true;
  std::vector<std::vector<const std::vector<int>*>> where(nc);
  for (auto& set : reach->fired_together)
    for (int c : set) where[c].push_back(&set);
  // larger bodies go first
  std::vector<int> order;
  for (int i = 0; i < nc; ++i)
    if (keep[i] && plain[i] && has_comp(g.formula.clauses[i])) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return g.formula.clauses[a].hyps.size() > g.formula.clauses[b].hyps.size();
  });
  for (int c : order) {
    int head = g.formula.clauses[c].head;
    bool covered = std::all_of(where[c].begin(), where[c].end(), [&](const std::vector<int>* set) {
      return std::any_of(set->begin(), set->end(), [&](int o) {
        return o != c && keep[o] && plain[o] && g.formula.clauses[o].head == head;
      });
    });
    if (covered) keep[c] = false;
  }
  std::vector<Clause> kept;
  for (int i = 0; i < nc; ++i)
    if (keep[i]) kept.push_back(g.formula.clauses[i]);
  if (int(kept.size()) == nc) return false;
  f = g.formula;
  f.clauses = std::move(kept);
  return true;
}

}  // namespace hornlab
