// Random small formulas for fuzzing the pipelines. Built directly as ASTs so
// the generator does not depend on the parser.
#pragma once

#include <random>

#include "hornlab/core.hpp"

namespace gen {

using namespace hornlab;

struct Rng {
  std::mt19937 r;
  explicit Rng(uint32_t seed) : r(seed) {}
  int in(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }
  bool coin(int pct = 50) { return in(1, 100) <= pct; }
};

inline Hyp random_literal(Rng& g, Logic logic, int sigma) {
  Var v = g.coin() ? Var::X : Var::Y;
  int off = logic == Logic::INCL ? g.in(-1, 1) : -g.in(0, 1);
  switch (g.in(0, 2)) {
    case 0: return minlit({v, off}, g.coin());
    case 1: return maxlit({v, off}, g.coin());
    default: return qlit(g.in(0, sigma - 1), {logic == Logic::PRED_DIO ? Var::X : v, off});
  }
}

inline Hyp random_atom(Rng& g, Logic logic, int preds) {
  int p = g.in(0, preds - 1);
  if (logic == Logic::INCL) {
    int a = g.in(0, 1), b = g.in(0, 1);
    return atom(p, tx(a), ty(-b));
  }
  int a = -g.in(0, 2), b = -g.in(0, 1);
  if (g.coin(15)) return atom(p, ty(b), tx(a));
  return atom(p, tx(a), ty(b));
}

// The result still needs validate() to add the guards.
inline Formula random_formula(uint32_t seed, Logic logic, int sigma = 2) {
  Rng g(seed);
  Formula f;
  f.logic = logic;
  for (int s = 0; s < sigma; ++s) f.alphabet.push_back(std::string(1, char('a' + s)));
  int m = g.in(1, 3);
  for (int i = 0; i < m; ++i) f.preds.push_back("P" + std::to_string(i));
  auto dio_eq = [&](Clause& c) {
    if (logic != Logic::PRED_DIO) return;
    for (auto& h : c.hyps)
      if (auto l = as<InputLiteral>(h); l && l->kind == InKind::Q) {
        c.hyps.push_back(rel(Cmp::EQ));
        return;
      }
  };
  int inits = g.in(1, 3);
  for (int i = 0; i < inits; ++i) {
    Clause c = make_clause({}, g.in(0, m - 1));
    int k = g.in(1, 2);
    for (int j = 0; j < k; ++j) c.hyps.push_back(random_literal(g, logic, sigma));
    if (logic == Logic::INCL && g.coin()) c.hyps.push_back(rel(Cmp::EQ));
    dio_eq(c);
    f.clauses.push_back(c);
  }
  int comps = g.in(2, 5);
  for (int i = 0; i < comps; ++i) {
    Clause c = make_clause({}, g.in(0, m - 1));
    int k = g.in(1, 2);
    for (int j = 0; j < k; ++j) c.hyps.push_back(random_atom(g, logic, m));
    if (g.coin(40)) c.hyps.push_back(random_literal(g, logic, sigma));
    dio_eq(c);
    f.clauses.push_back(c);
  }
  int falses = g.in(1, 2);
  for (int i = 0; i < falses; ++i) {
    Clause c = make_false({random_atom(g, logic, m)});
    if (logic == Logic::INCL) {
      if (g.coin(70)) {
        c.hyps = {minlit(tx()), maxlit(ty()), atom(g.in(0, m - 1))};
      }
    } else if (g.coin(70)) {
      c.hyps.push_back(maxlit(tx()));
      c.hyps.push_back(maxlit(ty()));
    }
    if (g.coin(30)) c.hyps.push_back(random_literal(g, logic, sigma));
    dio_eq(c);
    f.clauses.push_back(c);
  }
  return f;
}

}  // namespace gen
