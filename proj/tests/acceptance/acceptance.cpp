// One PASS/FAIL line per acceptance criterion. Tolerances are the constants
// below; exit status is nonzero when any criterion fails.
#include <chrono>
#include <cstdio>
#include <map>
#include <random>

#include "hornlab/compile.hpp"
#include "hornlab/corpus.hpp"
#include "hornlab/crosscheck.hpp"
#include "../oracles.hpp"

using namespace hornlab;

namespace {

constexpr int kBorderLen = 10;
constexpr long kBorderWords = 2046;
constexpr double kBorderSeconds = 10.0;
constexpr int kPreserveLenPred = 7;  // PRED and PRED_DIO
constexpr int kPreserveLenIncl = 8;
constexpr double kNormalizeSeconds = 60.0;
constexpr int kStepLen = 5;
constexpr int kCompiledLen = 7;
constexpr int kSiteLen = 5;
constexpr int kParityLen = 8;
constexpr int kDualityLen = 7;
constexpr int kHornFormulas = 1000;
constexpr int kHornMaxVars = 10;
constexpr int kHornMaxClauses = 15;
constexpr int kHornExhaustiveVars = 6;
constexpr int kMonotoneGroups = 10;
constexpr int kFullVsPrunedLen = 5;
constexpr int kMutantLen = 5;
constexpr int kMutantsPerFormula = 60;
constexpr double kMutantKillRate = 0.90;
constexpr int kMutantLongLen = 8;  // reported only

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

struct Entry {
  std::string name;
  Formula formula;
  Formula normal;
  double normalize_seconds = 0;
  int max_len = 0;
};

std::vector<Entry>& entries() {
  static std::vector<Entry> all = [] {
    std::vector<Entry> out;
    for (auto& e : corpus_entries()) {
      Entry x;
      x.name = e.name;
      x.formula = e.is_grammar ? grammar_to_formula(parse_grammar(e.source)) : parse_formula_or_throw(e.source);
      x.max_len = x.formula.logic == Logic::INCL ? kPreserveLenIncl : kPreserveLenPred;
      auto t0 = Clock::now();
      x.normal = normalize(x.formula);
      x.normalize_seconds = since(t0);
      out.push_back(std::move(x));
    }
    return out;
  }();
  return all;
}

long mismatches(const Formula& a, const Formula& b, int len) {
  long bad = 0;
  for (auto& w : shortlex_words(int(a.alphabet.size()), len)) bad += accepts(a, w) != accepts(b, w);
  return bad;
}

void criterion1() {
  auto t0 = Clock::now();
  Formula f = parse_formula_or_throw(find_entry("notBordered")->source);
  long words = 0, bad = 0;
  for (auto& w : shortlex_words(2, kBorderLen)) {
    ++words;
    bad += accepts(f, w) == oracle::bordered(w);
  }
  bool rejects = !accepts(f, parse_word(f.alphabet, "abbaabb"));
  double s = since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf, "notBordered vs border brute force: %ld words, %ld mismatches, %.2fs, abbaabb %s",
                words, bad, s, rejects ? "rejected" : "accepted");
  report(1, words == kBorderWords && bad == 0 && rejects && s < kBorderSeconds, buf);
}

void criterion2() {
  bool ok = true;
  std::string detail;
  for (auto& e : entries()) {
    long bad = mismatches(e.formula, e.normal, e.max_len);
    bool normal = is_normal(e.normal).normal;
    ok = ok && bad == 0 && normal && e.normalize_seconds < kNormalizeSeconds;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s(len %d, %ld mismatches, %.1fs%s) ", e.name.c_str(), e.max_len, bad,
                  e.normalize_seconds, normal ? "" : ", NOT normal");
    detail += buf;
  }
  report(2, ok, detail);
}

void criterion3() {
  bool ok = true;
  int steps = 0;
  std::string detail;
  for (auto& e : entries()) {
    const Formula* prev = &e.formula;
    auto r = normalize_traced(e.formula);
    for (auto& st : r.trace) {
      ++steps;
      long bad = mismatches(*prev, st.formula, kStepLen);
      if (bad) {
        ok = false;
        detail += e.name + " " + st.name + " differs on " + std::to_string(bad) + " words; ";
      }
      prev = &st.formula;
    }
  }
  report(3, ok, std::to_string(steps) + " steps, each against its predecessor up to length " +
                    std::to_string(kStepLen) + (detail.empty() ? "" : ": " + detail));
}

Bits site_state(const CellularAutomaton& ca, const SpaceTimeDiagram& d, int x, int y) {
  if (ca.kind == "oia") {
    auto p = oia_cell({x, y});
    return d.at(p.c, p.t);
  }
  if (ca.kind == "trellis") {
    auto p = trellis_cell({x, y});
    return d.at(p.c, p.t);
  }
  auto [p, slot] = ia_cell({x, y});
  return split_slots(d.at(p.c, p.t))[slot];
}

void criterion4() {
  bool ok = true;
  std::string detail;
  for (auto& e : entries()) {
    GridCircuit g = compile_grid(e.normal);
    auto ca = compile_automaton(g);
    long bad = 0, sites = 0, site_bad = 0;
    for (auto& w : shortlex_words(int(e.formula.alphabet.size()), kCompiledLen)) {
      auto d = run(ca, w);
      bad += d.accepted != accepts(e.formula, w);
      if (int(w.size()) > kSiteLen) continue;
      auto r = run_grid(g, w);
      int n = int(w.size());
      for (int x = 1; x <= n; ++x)
        for (int y = 1; y <= n; ++y)
          if (!r.at(x, y).empty()) {
            ++sites;
            site_bad += site_state(ca, d, x, y) != r.at(x, y);
          }
    }
    ok = ok && bad == 0 && site_bad == 0;
    detail += e.name + "(" + ca.kind + ", " + std::to_string(bad) + " mismatches, " + std::to_string(site_bad) + "/" +
              std::to_string(sites) + " bad sites) ";
  }
  report(4, ok, detail);
}

void criterion5() {
  auto par = parity_ca();
  auto oca = ca_to_oca_shift(par);
  long words = 0, bad = 0, wrong = 0;
  for (auto& w : shortlex_words(2, kParityLen)) {
    ++words;
    bool a = accepts_realtime(par, w);
    bad += a != accepts_realtime(oca, w);
    wrong += a != oracle::even_a(w);
  }
  report(5, bad == 0 && wrong == 0,
         "parity CA vs shifted OCA: " + std::to_string(words) + " words, " + std::to_string(bad) +
             " disagreements, " + std::to_string(wrong) + " parity errors");
}

void criterion6() {
  Grammar pal = parse_grammar(std::string(corpus_text::k_palindromeGrammar));
  Formula pf = grammar_to_formula(pal);
  Formula palf = parse_formula_or_throw(find_entry("palindrome")->source);
  Grammar dual = formula_to_grammar(normalize_incl(palf));
  long words = 0, bad1 = 0, bad2 = 0;
  for (auto& w : shortlex_words(2, kDualityLen)) {
    ++words;
    bool in = recognize(pal, w);
    bad1 += in == accepts(pf, w) || in != oracle::palindrome(w);
    // the dual grammar generates the words the formula rejects
    bad2 += recognize(dual, w) == accepts(palf, w);
  }
  report(6, bad1 == 0 && bad2 == 0,
         std::to_string(words) + " words; grammar->formula " + std::to_string(bad1) + " errors, formula->grammar (" +
             std::to_string(dual.rules.size()) + " rules) " + std::to_string(bad2) + " errors");
}

// Independent of the library: naive saturation, and entailment by refutation
// (F plus "not v" runs into a conflict).
std::vector<bool> naive_saturate(const PropositionalHornProblem& p) {
  std::vector<bool> in(p.vars, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& c : p.clauses) {
      bool fire = !in[c.head];
      for (int b : c.body) fire = fire && in[b];
      if (fire) in[c.head] = changed = true;
    }
  }
  return in;
}

bool entailed_by_refutation(const PropositionalHornProblem& p, int v) {
  auto in = naive_saturate(p);
  return in[v];  // F with the goal "v -> FALSE" is unsatisfiable iff saturation reaches v
}

bool is_model(const PropositionalHornProblem& p, uint32_t mask) {
  for (auto& c : p.clauses) {
    bool body = true;
    for (int b : c.body) body = body && (mask >> b & 1);
    if (body && !(mask >> c.head & 1)) return false;
  }
  return true;
}

void criterion7() {
  std::mt19937 rng(20261016);
  auto in = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  long bad = 0, exhaustive = 0;
  for (int t = 0; t < kHornFormulas; ++t) {
    PropositionalHornProblem p;
    p.vars = in(1, kHornMaxVars);
    int nc = in(1, kHornMaxClauses);
    for (int i = 0; i < nc; ++i) {
      HornClause c;
      int k = in(0, 3);
      for (int j = 0; j < k; ++j) c.body.push_back(in(0, p.vars - 1));
      c.head = in(0, p.vars - 1);
      p.clauses.push_back(c);
    }
    auto model = horn_closure(p, {});
    // implied facts, then the minimal model of those facts under F
    std::vector<int> implied;
    for (int v = 0; v < p.vars; ++v)
      if (entailed_by_refutation(p, v)) implied.push_back(v);
    auto model_of_implied = horn_closure(p, implied);
    std::vector<bool> implied_set(p.vars, false);
    for (int v : implied) implied_set[v] = true;
    bool ok = model == implied_set && model_of_implied == model && model == naive_saturate(p);
    uint32_t mmask = 0;
    for (int v = 0; v < p.vars; ++v) mmask |= uint32_t(model[v]) << v;
    ok = ok && is_model(p, mmask);
    if (p.vars <= kHornExhaustiveVars) {
      ++exhaustive;
      uint32_t meet = (1u << p.vars) - 1;
      for (uint32_t m = 0; m < (1u << p.vars); ++m)
        if (is_model(p, m)) meet &= m;
      ok = ok && meet == mmask;
    }
    bad += !ok;
  }
  report(7, bad == 0,
         std::to_string(kHornFormulas) + " random strict Horn formulas, " + std::to_string(exhaustive) +
             " also by exhaustive enumeration, " + std::to_string(bad) + " mismatches");
}

void criterion8() {
  // K_J monotone on random grouped problems with up to kMonotoneGroups groups
  std::mt19937 rng(8);
  auto in = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int problems = 0, nonmono = 0;
  for (int k = 1; k <= kMonotoneGroups; ++k)
    for (int t = 0; t < 20; ++t) {
      GroupedHorn g;
      g.theta.vars = in(k, 3 * k + 2);
      for (int i = 0, nc = in(0, 3 * k); i < nc; ++i) {
        HornClause c;
        for (int j = 0, b = in(1, 3); j < b; ++j) c.body.push_back(in(0, g.theta.vars - 1));
        c.head = in(0, g.theta.vars - 1);
        g.theta.clauses.push_back(c);
      }
      for (int i = 0; i < k; ++i) {
        std::vector<int> heads;
        for (int j = 0, h = in(0, 2); j < h; ++j) heads.push_back(in(0, g.theta.vars - 1));
        g.group_heads.push_back(heads);
      }
      if (in(0, 1)) g.base.push_back(in(0, g.theta.vars - 1));
      ++problems;
      nonmono += !k_monotone(all_k(g));
    }
  // normalization checks every block of at most kMonotoneGroups groups itself
  int blocks = 0, checked = 0, small = 0;
  for (auto& e : entries()) {
    auto r = normalize_traced(e.formula);
    blocks += r.kstats.blocks;
    checked += r.kstats.blocks_checked;
    small += r.kstats.blocks - r.kstats.blocks_sampled;
  }
  // full subset emission vs minimal supports, where the subset cap allows it
  std::string cmp;
  long bad = 0;
  for (auto& e : entries()) {
    NormalizeOptions full;
    full.full_subsets = true;
    try {
      Formula ff = normalize(e.formula, full);
      long m = mismatches(e.normal, ff, kFullVsPrunedLen);
      bad += m;
      cmp += e.name + " " + std::to_string(m) + " mismatches; ";
    } catch (const Error&) {
      cmp += e.name + " over the subset cap; ";
    }
  }
  report(8, nonmono == 0 && checked >= small && bad == 0,
         std::to_string(problems) + " random problems, " + std::to_string(nonmono) + " non-monotone; corpus blocks " +
             std::to_string(checked) + "/" + std::to_string(blocks) + " checked exhaustively; full vs pruned: " + cmp);
}

void criterion9() {
  std::mt19937 rng(9);
  int mutants = 0, killed = 0, longest = 0, killed_long = 0;
  std::string detail;
  for (auto& e : entries()) {
    std::vector<int> comp;
    for (int i = 0; i < int(e.normal.clauses.size()); ++i)
      if (!e.normal.clauses[i].is_false && has_comp(e.normal.clauses[i])) comp.push_back(i);
    std::shuffle(comp.begin(), comp.end(), rng);
    int m = int(e.normal.preds.size()), local = 0, local_killed = 0;
    if (m < 2) continue;
    for (int i = 0; i < int(comp.size()) && local < kMutantsPerFormula; ++i) {
      Formula mut = e.normal;
      Clause& c = mut.clauses[comp[i]];
      int h = std::uniform_int_distribution<int>(0, m - 2)(rng);
      c.head = h >= c.head ? h + 1 : h;
      ++local;
      CrossCheckInput in{e.name + " mutant", mut, std::nullopt, [&n = e.normal](const Word& w) { return accepts(n, w); }};
      auto r = crosscheck(in, kMutantLen, {"oracle", "reference"});
      if (r.counterexample) {
        ++local_killed;
        longest = std::max(longest, int(r.counterexample->size()));
      } else if (crosscheck(in, kMutantLongLen, {"oracle", "reference"}).counterexample) {
        ++killed_long;
      }
    }
    mutants += local;
    killed += local_killed;
    detail += e.name + " " + std::to_string(local_killed) + "/" + std::to_string(local) + "; ";
  }
  double rate = mutants ? double(killed) / mutants : 0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d/%d mutants detected up to length %d (%.1f%%), longest counterexample %d, %d more up to length %d; ",
                killed, mutants, kMutantLen, 100 * rate, longest, killed_long, kMutantLongLen);
  report(9, mutants > 0 && rate >= kMutantKillRate, buf + detail);
}

}  // namespace

int main() {
  for (auto* c : {criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8,
                  criterion9}) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("criterion error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
