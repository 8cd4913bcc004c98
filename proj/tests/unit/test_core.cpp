#include "doctest.h"
#include "hornlab/fixpoint.hpp"
#include "hornlab/corpus.hpp"
#include "hornlab/text.hpp"
#include "../oracles.hpp"

using namespace hornlab;

static Formula load(const char* name) {
  return parse_formula_or_throw(oracle::slurp(std::string(HORNLAB_SAMPLES) + "/" + name));
}

TEST_CASE("notBordered parses as a one-predicate pred formula") {
  Formula f = load("notBordered.horn");
  CHECK(f.logic == Logic::PRED);
  CHECK(f.preds == std::vector<std::string>{"Border"});
  CHECK(f.alphabet.size() == 2);
  CHECK(max_offset(f) == std::pair{1, 1});
  CHECK(validate(f).ok());
}

TEST_CASE("notBordered on abbaabb reproduces the figure") {
  Formula f = load("notBordered.horn");
  Word w = parse_word(f.alphabet, "abbaabb");
  Model m = evaluate(f, w);
  CHECK(m.bottom_derived);
  // the chain drawn in the figure
  CHECK(m.get(0, 1, 5));
  CHECK(m.get(0, 2, 6));
  CHECK(m.get(0, 3, 7));
  CHECK(m.get(0, 1, 4));
  CHECK_FALSE(m.get(0, 2, 5));
  // Border(x,y) iff x<y and w_1..w_x = w_{y-x+1}..w_y
  for (int x = 1; x <= 7; ++x)
    for (int y = 1; y <= 7; ++y) {
      bool expect = x < y;
      for (int i = 0; i < x && expect; ++i) expect = w[i] == w[y - x + i];
      CHECK(m.get(0, x, y) == expect);
    }
}

TEST_CASE("notBordered agrees with the border brute force") {
  Formula f = load("notBordered.horn");
  for (auto& w : shortlex_words(2, 9)) CHECK(accepts(f, w) == !oracle::bordered(w));
  CHECK(accepts(f, {0}));
  CHECK(accepts(f, {0, 1}));
  auto lang = enumerate_language(*&f, 3);
  Formula unary = f;
  unary.alphabet = {"a"};
  unary.clauses = {f.clauses[0], f.clauses[2], f.clauses[4]};
  auto l1 = enumerate_language(unary, 3);
  REQUIRE(l1.size() == 1);
  CHECK(l1[0] == Word{0});
}

TEST_CASE("palindrome formula and enumeration") {
  Formula f = load("palindrome.horn");
  auto lang = enumerate_language(f, 3);
  std::vector<std::string> got;
  for (auto& w : lang) got.push_back(word_string(f.alphabet, w));
  CHECK(got == std::vector<std::string>{"a", "b", "aa", "bb", "aaa", "aba", "bab", "bbb"});
  for (auto& w : shortlex_words(2, 8)) CHECK(accepts(f, w) == oracle::palindrome(w));
  Model m = evaluate(f, {0, 1});
  CHECK(m.get(f.pred_index("notPal"), 1, 2));
  CHECK(m.bottom_derived);
  CHECK_THROWS(enumerate_language(f, 13));
}

TEST_CASE("notPalindrome and the diagonal sample") {
  Formula np = load("notPalindrome.horn");
  for (auto& w : shortlex_words(2, 8)) CHECK(accepts(np, w) == !oracle::palindrome(w));
  Formula fl = load("firstLastA.horn");
  CHECK(fl.logic == Logic::PRED_DIO);
  for (auto& w : shortlex_words(2, 7)) CHECK(accepts(fl, w) == oracle::first_last_a(w));
}

TEST_CASE("empty formula accepts everything") {
  Formula f = parse_formula_or_throw("logic pred\nalphabet a\n");
  CHECK(f.clauses.empty());
  auto l = enumerate_language(f, 2);
  CHECK(l.size() == 2);
  CHECK(max_offset(f) == std::pair{0, 0});
  CHECK_THROWS(evaluate(f, {}));
}

TEST_CASE("evaluation order does not change the model") {
  for (const char* name : {"notBordered.horn", "palindrome.horn", "notPalindrome.horn", "firstLastA.horn"}) {
    Formula f = load(name);
    for (auto& w : shortlex_words(2, 5)) {
      Model base = evaluate(f, w);
      for (uint64_t seed = 1; seed <= 3; ++seed) CHECK(evaluate(f, w, {seed}) == base);
    }
  }
}

TEST_CASE("adding a clause never removes an atom") {
  Formula f = load("notPalindrome.horn");
  Formula g = f;
  g.clauses.push_back(make_clause({rel(Cmp::LT), qlit(0, tx())}, f.pred_index("Pal")));
  for (auto& w : shortlex_words(2, 5)) {
    Model a = evaluate(f, w), b = evaluate(g, w);
    for (size_t i = 0; i < a.bits.size(); ++i) CHECK((!a.bits[i] || b.bits[i]));
  }
}

TEST_CASE("pred atoms only depend on the letters up to max(x,y)") {
  Formula f = load("notBordered.horn");
  for (auto& w : shortlex_words(2, 6)) {
    Model m = evaluate(f, w);
    int n = int(w.size());
    for (int x = 1; x <= n; ++x)
      for (int y = 1; y <= n; ++y) {
        int keep = std::max(x, y);
        Word v = w;
        for (int i = keep; i < n; ++i) v[i] = 1 - v[i];
        CHECK(evaluate(f, v).get(0, x, y) == m.get(0, x, y));
      }
  }
}

TEST_CASE("desugaring") {
  Formula f = parse_formula_or_throw("logic incl\nalphabet a\nx<=y & y<=n-2 & x>3 & x=1 & x=3 -> R(x,y)\n");
  Formula d = desugar(f);
  auto& h = d.clauses[0].hyps;
  CHECK(h[1] == Hyp(maxlit(ty(1), false)));
  CHECK(h[2] == Hyp(minlit(tx(-2), false)));
  CHECK(h[3] == Hyp(minlit(tx())));
  CHECK(h[4] == Hyp(minlit(tx(-2))));
  CHECK(h[5] == Hyp(minlit(tx(-1), false)));
  CHECK(desugar(d) == d);
  for (auto& w : shortlex_words(1, 6)) CHECK(evaluate(f, w) == evaluate(d, w));
  CHECK(validate(d).ok());
  Formula g = load("notBordered.horn");
  CHECK(desugar(g) == g);
}

TEST_CASE("validation diagnostics") {
  auto r = parse_formula("logic pred\nalphabet a\nS(x+1,y) -> S(x,y)\n");
  CHECK_FALSE(r.ok());
  bool found = false;
  for (auto& d : r.diags) found |= d.rule == "positive-offset";
  CHECK(found);
  auto strict = parse_formula("logic pred\nalphabet a\nS(x-1,y) -> S(x,y)\n", {.insert_guards = false});
  CHECK_FALSE(strict.ok());
  auto guarded = parse_formula("logic pred\nalphabet a\nS(x-1,y) -> S(x,y)\n");
  REQUIRE(guarded.ok());
  CHECK(guarded.formula->clauses[0].hyps.size() == 2);
  auto dio = parse_formula("logic pred-dio\nalphabet a\nx=y & min(x) -> S(x,y)\n");
  REQUIRE(dio.ok());
  CHECK(dio.diags.size() == 1);
  CHECK_FALSE(dio.diags[0].error);
  auto cap = parse_formula("logic pred\nalphabet a\nS(x-9,y) -> S(x,y)\n");
  CHECK_FALSE(cap.ok());
  auto cap2 = parse_formula("logic pred\nalphabet a\nS(x-9,y) -> S(x,y)\n", {.insert_guards = true, .max_offset = 9});
  CHECK(cap2.ok());
}

TEST_CASE("syntax errors carry spans") {
  auto r = parse_formula("logic pred\nalphabet a\nmin(x -> R(x,y)\n");
  REQUIRE_FALSE(r.ok());
  CHECK(r.diags[0].span.line == 3);
  CHECK(r.diags[0].span.column == 4);
  auto u = parse_formula("logic pred\nalphabet a\nT(x-1,y) -> R(x,y)\n");
  CHECK_FALSE(u.ok());
  auto q = parse_formula("logic incl\nalphabet a\nx=y & Qa(x) -> R(x,y)\n");
  CHECK(q.ok());
}

TEST_CASE("round trip printing") {
  for (const char* name : {"notBordered.horn", "palindrome.horn", "notPalindrome.horn", "firstLastA.horn"}) {
    Formula f = load(name);
    std::string text = print_formula(f);
    Formula g = parse_formula_or_throw(text);
    CHECK(g == f);
    CHECK(print_formula(g) == text);
  }
  Formula e = parse_formula_or_throw("logic incl\nalphabet a b\n");
  CHECK(print_formula(e) == "logic incl\nalphabet a b\n");
}

TEST_CASE("unicode letters and operators") {
  auto r = parse_formula("logic pred-dio\nalphabet é ß\nx=y ∧ Qé(x) → R(x,y)\nmax(x) ∧ max(y) ∧ R(x,y) → ⊥\n");
  REQUIRE(r.ok());
  Formula f = *r.formula;
  CHECK_FALSE(accepts(f, parse_word(f.alphabet, "ßé")));
  CHECK(accepts(f, parse_word(f.alphabet, "éß")));
  auto bad = parse_formula("logic pred\nalphabet ab\n");
  CHECK_FALSE(bad.ok());
  auto comb = parse_formula("logic pred\nalphabet e\xCC\x81 b\n");
  CHECK(comb.ok());
}

TEST_CASE("parsing never crashes on junk") {
  std::mt19937 rng(7);
  const std::string pieces[] = {"logic", " pred", "\n", "alphabet a b", "(", ")", "x", "y", "-", "+", "1", "->",
                                "&", "~", "min", "Qa", "R", ",", "FALSE", "<=", "=", "n", "\xE2\x86", "\xFF", "#"};
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    int len = rng() % 30;
    for (int k = 0; k < len; ++k) s += pieces[rng() % std::size(pieces)];
    auto r = parse_formula(s);
    CHECK((r.ok() || !r.diags.empty()));
  }
}

TEST_CASE("embedded corpus matches samples") {
  for (const auto& e : corpus_entries()) {
    std::string file = std::string(HORNLAB_SAMPLES) + "/" + (e.is_grammar ? "palindrome.lcg" : e.name + ".horn");
    CAPTURE(e.name);
    CHECK(oracle::slurp(file) == e.source);
  }
}
