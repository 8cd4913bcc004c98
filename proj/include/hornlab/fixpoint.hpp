// Least-model evaluation over the word structure. This is the reference
// oracle every other stage is compared against.
#pragma once

#include <deque>
#include <numeric>
#include <random>

#include "core.hpp"

namespace hornlab {

struct Model {
  int n = 0, m = 0;
  std::vector<uint8_t> bits;  // [pred][x-1][y-1]
  bool bottom_derived = false;

  bool get(int p, int x, int y) const { return bits[(size_t(p) * n + (x - 1)) * n + (y - 1)]; }
  uint8_t& at(int p, int x, int y) { return bits[(size_t(p) * n + (x - 1)) * n + (y - 1)]; }
  bool operator==(const Model& o) const { return n == o.n && bits == o.bits && bottom_derived == o.bottom_derived; }
};

struct EvalOptions {
  uint64_t seed = 0;  // nonzero: randomized clause and work-queue order
};

namespace detail {

inline int clampv(int v, int n) { return v < 1 ? 1 : v > n ? n : v; }

struct Site {
  int x, y;
  int val(const Term& t, int n) const { return clampv((t.var == Var::X ? x : y) + t.offset, n); }
  int raw(Var v) const { return v == Var::X ? x : y; }
};

inline bool cmp(int a, Cmp op, int b) {
  switch (op) {
    case Cmp::EQ: return a == b;
    case Cmp::LT: return a < b;
    case Cmp::LE: return a <= b;
    case Cmp::GT: return a > b;
    case Cmp::GE: return a >= b;
  }
  return false;
}

inline bool holds(const Hyp& h, Site s, const Word& w, const Model& mdl) {
  int n = int(w.size());
  if (auto l = as<InputLiteral>(h)) {
    int v = s.val(l->term, n);
    bool r = l->kind == InKind::Q ? w[v - 1] == l->letter : l->kind == InKind::MIN ? v == 1 : v == n;
    return r == l->positive;
  }
  if (auto a = as<ArithAtom>(h)) {
    switch (a->kind) {
      case ArithAtom::Kind::Rel: return cmp(s.x + a->k, a->op, s.y);
      case ArithAtom::Kind::Start: return cmp(s.raw(a->var), a->op, a->k);
      case ArithAtom::Kind::End: return cmp(s.raw(a->var), a->op, n - a->k);
    }
  }
  auto p = as<CompAtom>(h);
  return mdl.get(p->pred, s.val(p->a1, n), s.val(p->a2, n));
}

inline bool fires(const Clause& c, Site s, const Word& w, const Model& mdl) {
  for (auto& h : c.hyps)
    if (!holds(h, s, w, mdl)) return false;
  return true;
}

// Values of v in [1,n] with clamp(v+k) == target.
inline std::pair<int, int> preimage(int target, int k, int n) {
  int lo = target - k, hi = target - k;
  if (target == 1) lo = 1;
  if (target == n) hi = n;
  return {std::max(lo, 1), std::min(hi, n)};
}

}  // namespace detail

inline Model evaluate(const Formula& f, const Word& w, const EvalOptions& opt = {}) {
  using namespace detail;
  int n = int(w.size());
  if (n == 0) throw Error("the empty word has no word structure");
  for (int c : w)
    if (c < 0 || c >= int(f.alphabet.size())) throw Error("letter outside the alphabet");
  Model mdl;
  mdl.n = n;
  mdl.m = int(f.preds.size());
  mdl.bits.assign(size_t(mdl.m) * n * n, 0);

  std::vector<int> order(f.clauses.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(opt.seed);
  if (opt.seed) std::shuffle(order.begin(), order.end(), rng);

  // occurrences of each predicate in hypotheses
  std::vector<std::vector<std::pair<int, int>>> occ(mdl.m);
  for (int ci : order) {
    const Clause& c = f.clauses[ci];
    if (c.is_false) continue;
    for (int hi = 0; hi < int(c.hyps.size()); ++hi)
      if (auto p = as<CompAtom>(c.hyps[hi])) occ[p->pred].push_back({ci, hi});
  }

  struct Fact {
    int p, x, y;
  };
  std::deque<Fact> queue;
  auto derive = [&](int p, int x, int y) {
    uint8_t& b = mdl.at(p, x, y);
    if (!b) {
      b = 1;
      queue.push_back({p, x, y});
    }
  };

  for (int ci : order) {
    const Clause& c = f.clauses[ci];
    if (c.is_false || has_comp(c)) continue;
    for (int x = 1; x <= n; ++x)
      for (int y = 1; y <= n; ++y)
        if (fires(c, {x, y}, w, mdl)) derive(c.head, x, y);
  }

  while (!queue.empty()) {
    Fact fact;
    if (opt.seed) {
      size_t i = rng() % queue.size();
      std::swap(queue[i], queue.front());
    }
    fact = queue.front();
    queue.pop_front();
    for (auto [ci, hi] : occ[fact.p]) {
      const Clause& c = f.clauses[ci];
      auto* a = as<CompAtom>(c.hyps[hi]);
      auto r1 = preimage(fact.x, a->a1.offset, n);
      auto r2 = preimage(fact.y, a->a2.offset, n);
      for (int u = r1.first; u <= r1.second; ++u)
        for (int v = r2.first; v <= r2.second; ++v) {
          Site s;
          if (a->a1.var == a->a2.var) {
            if (u != v) continue;
            // both arguments on one variable: the other one is free
            for (int o = 1; o <= n; ++o) {
              s = a->a1.var == Var::X ? Site{u, o} : Site{o, u};
              if (fires(c, s, w, mdl)) derive(c.head, s.x, s.y);
            }
            continue;
          }
          s = a->a1.var == Var::X ? Site{u, v} : Site{v, u};
          if (fires(c, s, w, mdl)) derive(c.head, s.x, s.y);
        }
    }
  }

  for (auto& c : f.clauses) {
    if (!c.is_false) continue;
    for (int x = 1; x <= n && !mdl.bottom_derived; ++x)
      for (int y = 1; y <= n && !mdl.bottom_derived; ++y)
        if (fires(c, {x, y}, w, mdl)) mdl.bottom_derived = true;
  }
  return mdl;
}

inline bool accepts(const Formula& f, const Word& w) { return !evaluate(f, w).bottom_derived; }

constexpr int kEnumerateCap = 12;

inline std::vector<Word> enumerate_language(const Formula& f, int max_len, int cap = kEnumerateCap) {
  if (max_len > cap) throw Error("max length " + std::to_string(max_len) + " exceeds the cap " + std::to_string(cap));
  std::vector<Word> out;
  for (auto& w : shortlex_words(int(f.alphabet.size()), max_len))
    if (accepts(f, w)) out.push_back(w);
  return out;
}

}  // namespace hornlab
