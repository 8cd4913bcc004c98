// Propositional strict Horn reasoning. Backs the elimination of same-site
// hypotheses: which heads follow from a set of fired neighbour atoms.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "core.hpp"

namespace hornlab {

struct HornClause {
  std::vector<int> body;
  int head = 0;
};

struct PropositionalHornProblem {
  int vars = 0;
  std::vector<HornClause> clauses;
};

// Least set containing facts and closed under the clauses (counter-based unit propagation).
inline std::vector<bool> horn_closure(const PropositionalHornProblem& p, const std::vector<int>& facts) {
  std::vector<bool> in(p.vars, false);
  std::vector<int> missing(p.clauses.size());
  std::vector<std::vector<int>> watch(p.vars);
  std::vector<int> stack;
  auto add = [&](int v) {
    if (!in[v]) {
      in[v] = true;
      stack.push_back(v);
    }
  };
  for (size_t i = 0; i < p.clauses.size(); ++i) {
    std::vector<int> b = p.clauses[i].body;
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    missing[i] = int(b.size());
    for (int v : b) watch[v].push_back(int(i));
  }
  for (size_t i = 0; i < p.clauses.size(); ++i)
    if (missing[i] == 0) add(p.clauses[i].head);
  for (int f : facts) add(f);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int ci : watch[v])
      if (--missing[ci] == 0) add(p.clauses[ci].head);
  }
  return in;
}

inline std::vector<int> closure_set(const PropositionalHornProblem& p, const std::vector<int>& facts) {
  auto in = horn_closure(p, facts);
  std::vector<int> out;
  for (int v = 0; v < p.vars; ++v)
    if (in[v]) out.push_back(v);
  return out;
}

// Groups: when group i is switched on, its heads become facts.
struct GroupedHorn {
  PropositionalHornProblem theta;
  std::vector<std::vector<int>> group_heads;
  std::vector<int> base;  // facts that hold regardless of groups
};

constexpr int kSubsetCap = 16;

inline std::vector<int> k_of(const GroupedHorn& g, uint32_t mask) {
  std::vector<int> facts = g.base;
  for (size_t i = 0; i < g.group_heads.size(); ++i)
    if (mask >> i & 1) facts.insert(facts.end(), g.group_heads[i].begin(), g.group_heads[i].end());
  return closure_set(g.theta, facts);
}

// K_J for every J, indexed by bitmask. Refuses more than kSubsetCap groups.
inline std::vector<std::vector<int>> all_k(const GroupedHorn& g, int cap = kSubsetCap) {
  int k = int(g.group_heads.size());
  if (k > cap)
    throw Error(std::to_string(k) + " distinct neighbour groups exceed the subset cap " + std::to_string(cap) +
                "; use the support-based mode or split the formula");
  std::vector<std::vector<int>> out(size_t(1) << k);
  for (uint32_t m = 0; m < out.size(); ++m) out[m] = k_of(g, m);
  return out;
}

inline bool k_monotone(const std::vector<std::vector<int>>& K) {
  for (uint32_t m = 0; m < K.size(); ++m)
    for (uint32_t b = 1; b < K.size(); b <<= 1)
      if (!(m & b) && !std::includes(K[m | b].begin(), K[m | b].end(), K[m].begin(), K[m].end())) return false;
  return true;
}

// Minimal supports: for every variable h, the inclusion-minimal group sets J
// with h in K_J. Computed as an antichain fixpoint, so it does not pay 2^k.
using Support = std::vector<int>;  // sorted group indices

struct SupportLimits {
  size_t per_var = 20000;
};

inline std::vector<std::vector<Support>> minimal_supports(const GroupedHorn& g, SupportLimits lim = {}) {
  int m = g.theta.vars;
  std::vector<std::vector<Support>> sup(m);

  auto subset = [](const Support& a, const Support& b) {  // a ⊆ b
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  // true if s was new (not dominated); removes dominated entries
  auto insert = [&](int h, Support s) {
    auto& L = sup[h];
    for (auto& e : L)
      if (subset(e, s)) return false;
    L.erase(std::remove_if(L.begin(), L.end(), [&](const Support& e) { return subset(s, e); }), L.end());
    L.push_back(std::move(s));
    if (L.size() > lim.per_var) throw Error("support antichain too large while eliminating same-site hypotheses");
    return true;
  };

  for (int b : g.base) insert(b, {});
  for (size_t i = 0; i < g.group_heads.size(); ++i)
    for (int h : g.group_heads[i]) insert(h, {int(i)});

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& c : g.theta.clauses) {
      // product of the body supports, pruned on the fly
      std::vector<Support> acc{{}};
      bool dead = false;
      for (int b : c.body) {
        if (sup[b].empty()) {
          dead = true;
          break;
        }
        std::vector<Support> next;
        for (auto& a : acc)
          for (auto& s : sup[b]) {
            Support u;
            std::set_union(a.begin(), a.end(), s.begin(), s.end(), std::back_inserter(u));
            bool dominated = false;
            for (auto& e : next)
              if (subset(e, u)) {
                dominated = true;
                break;
              }
            if (dominated) continue;
            next.erase(std::remove_if(next.begin(), next.end(), [&](const Support& e) { return subset(u, e); }),
                       next.end());
            next.push_back(std::move(u));
          }
        acc = std::move(next);
        if (acc.size() > lim.per_var) throw Error("support product too large while eliminating same-site hypotheses");
      }
      if (dead) continue;
      for (auto& s : acc)
        if (insert(c.head, s)) changed = true;
    }
  }
  for (auto& L : sup) std::sort(L.begin(), L.end());
  return sup;
}

// Splits the groups into independent blocks: two groups share a block when
// their heads are linked through theta clauses. A head outside a block's
// variables cannot help derive anything inside it, so K_J is the union of
// K_{J restricted to each block}.
inline std::vector<std::vector<int>> group_blocks(const GroupedHorn& g) {
  int m = g.theta.vars;
  std::vector<int> up(m);
  for (int i = 0; i < m; ++i) up[i] = i;
  std::function<int(int)> find = [&](int v) { return up[v] == v ? v : up[v] = find(up[v]); };
  auto unite = [&](int a, int b) { up[find(a)] = find(b); };
  for (auto& c : g.theta.clauses)
    for (int b : c.body) unite(b, c.head);
  for (auto& hs : g.group_heads)
    for (size_t i = 1; i < hs.size(); ++i) unite(hs[0], hs[i]);
  std::map<int, std::vector<int>> by_root;
  std::vector<std::vector<int>> out;
  for (int i = 0; i < int(g.group_heads.size()); ++i) {
    if (g.group_heads[i].empty()) {
      out.push_back({i});
      continue;
    }
    by_root[find(g.group_heads[i][0])].push_back(i);
  }
  for (auto& [r, v] : by_root) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

struct KStats {
  int runs = 0;  // eliminations performed
  int max_groups = 0;
  int blocks = 0;          // independent group blocks over all runs
  int blocks_checked = 0;  // of which K_J monotonicity was verified on every subset
  int max_block = 0;
  int blocks_sampled = 0;  // larger blocks: monotonicity checked on random pairs J, J+i
};

// J ⊆ J+i  =>  K_J ⊆ K_{J+i}, on a fixed pseudo-random sample of pairs.
inline bool k_monotone_sampled(const GroupedHorn& g, int pairs, uint64_t seed = 1) {
  int k = int(g.group_heads.size());
  std::mt19937_64 rng(seed);
  for (int t = 0; t < pairs; ++t) {
    std::vector<int> J;
    std::vector<int> rest;
    for (int i = 0; i < k; ++i) (rng() & 1 ? J : rest).push_back(i);
    if (rest.empty()) continue;
    int extra = rest[rng() % rest.size()];
    auto close = [&](const std::vector<int>& groups) {
      std::vector<int> facts = g.base;
      for (int i : groups) facts.insert(facts.end(), g.group_heads[i].begin(), g.group_heads[i].end());
      return closure_set(g.theta, facts);
    };
    auto a = close(J);
    J.push_back(extra);
    auto b = close(J);
    if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) return false;
  }
  return true;
}

constexpr int kMonotoneCheckUpTo = 10;

// The clauses "AND of groups in J -> h". full: every h in K_J for every J
// inside one block. Otherwise only the minimal J per h, which the full set
// subsumes. Blocks of at most kMonotoneCheckUpTo groups get K_J monotonicity
// checked on all subsets either way.
inline std::vector<std::pair<Support, int>> k_clauses(const GroupedHorn& g, bool full, KStats* st = nullptr) {
  auto blocks = group_blocks(g);
  if (st) {
    ++st->runs;
    st->max_groups = std::max(st->max_groups, int(g.group_heads.size()));
  }
  std::set<std::pair<Support, int>> seen;
  std::vector<std::pair<Support, int>> out;
  auto emit = [&](Support J, int h) {
    if (seen.insert({J, h}).second) out.push_back({std::move(J), h});
  };
  if (blocks.empty()) blocks.push_back({});
  for (auto& B : blocks) {
    GroupedHorn sub;
    sub.theta = g.theta;
    sub.base = g.base;
    for (int i : B) sub.group_heads.push_back(g.group_heads[i]);
    int k = int(B.size());
    if (st) {
      ++st->blocks;
      st->max_block = std::max(st->max_block, k);
    }
    auto global = [&](const Support& local) {
      Support J;
      for (int i : local) J.push_back(B[i]);
      return J;
    };
    if (full || k <= kMonotoneCheckUpTo) {
      auto K = all_k(sub);
      if (!k_monotone(K)) throw Error("K_J is not monotone");
      if (st) ++st->blocks_checked;
      if (full) {
        for (uint32_t mask = 0; mask < K.size(); ++mask) {
          Support J;
          for (int i = 0; i < k; ++i)
            if (mask >> i & 1) J.push_back(i);
          for (int h : K[mask]) emit(global(J), h);
        }
        continue;
      }
    }
    if (k > kMonotoneCheckUpTo) {
      if (!k_monotone_sampled(sub, 256)) throw Error("K_J is not monotone");
      if (st) ++st->blocks_sampled;
    }
    auto sup = minimal_supports(sub);
    for (int h = 0; h < int(sup.size()); ++h)
      for (auto& J : sup[h]) emit(global(J), h);
  }
  std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.second < b.second; });
  return out;
}

}  // namespace hornlab
