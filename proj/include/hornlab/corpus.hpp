// The example formulas and the grammar sample, each with a decider written
// straight from the language definition (no library code involved).
#pragma once

#include <functional>

#include "core.hpp"

namespace hornlab {

namespace corpus_text {
inline constexpr const char* k_notBordered = R"HORN(# Words with no proper prefix equal to a proper suffix.
# Border(x,y) holds when w_1..w_x = w_{y-x+1}..w_y.
logic pred
alphabet a b
min(x) & ~min(y) & Qa(x) & Qa(y) -> Border(x,y)
min(x) & ~min(y) & Qb(x) & Qb(y) -> Border(x,y)
~min(x) & ~min(y) & Border(x-1,y-1) & Qa(x) & Qa(y) -> Border(x,y)
~min(x) & ~min(y) & Border(x-1,y-1) & Qb(x) & Qb(y) -> Border(x,y)
max(y) & Border(x,y) -> FALSE
)HORN";

inline constexpr const char* k_palindrome = R"HORN(logic incl
alphabet a b
x<y & Qa(x) & Qb(y) -> notPal(x,y)
x<y & Qb(x) & Qa(y) -> notPal(x,y)
x<y & notPal(x+1,y-1) -> notPal(x,y)
x<=y & min(x) & max(y) & notPal(x,y) -> FALSE
)HORN";

inline constexpr const char* k_notPalindrome = R"HORN(# The contradiction clause carries min(x) & max(y): without them every word
# with a one-letter factor would be rejected.
logic incl
alphabet a b
x=y -> Equal(x,y)
x<y & Equal(x+1,y) -> Successor(x,y)
x=y -> Pal(x,y)
x<=y & Successor(x,y) & Qa(x) & Qa(y) -> Pal(x,y)
x<=y & Successor(x,y) & Qb(x) & Qb(y) -> Pal(x,y)
x<y & Pal(x+1,y-1) & Qa(x) & Qa(y) -> Pal(x,y)
x<y & Pal(x+1,y-1) & Qb(x) & Qb(y) -> Pal(x,y)
x<=y & min(x) & max(y) & Pal(x,y) -> FALSE
)HORN";

inline constexpr const char* k_firstLastA = R"HORN(# Words that start and end with the letter a, read on the diagonal.
# Bad marks a wrong first letter and is carried towards (n,n).
logic pred-dio
alphabet a b
x=y & min(x) & Qb(x) -> Bad(x,y)
~min(x) & Bad(x-1,y) -> Bad(x,y)
~min(y) & Bad(x,y-1) -> Bad(x,y)
max(x) & max(y) & Bad(x,y) -> FALSE
x=y & max(x) & Qb(x) -> FALSE
)HORN";

inline constexpr const char* k_palindromeGrammar = R"HORN(# Palindromes over {a,b}. Zs derives u s for a palindrome u, so P -> s Zs
# derives s u s.
start P
P -> a | b | a Za | b Zb
Za -> a | P a
Zb -> b | P b
)HORN";
}  // namespace corpus_text

namespace reference {

// some proper prefix equals the suffix of the same length
inline bool bordered(const Word& w) {
  int n = int(w.size());
  for (int k = 1; k < n; ++k)
    if (std::equal(w.begin(), w.begin() + k, w.end() - k)) return true;
  return false;
}

inline bool palindrome(const Word& w) { return std::equal(w.begin(), w.end(), w.rbegin()); }

inline bool first_last_a(const Word& w) { return w.front() == 0 && w.back() == 0; }

}  // namespace reference

struct CorpusEntry {
  std::string name;
  std::string source;
  bool is_grammar = false;
  Logic logic = Logic::PRED;
  std::string description;
  std::function<bool(const Word&)> reference;  // membership in the language
  int max_len = 7;
};

inline const std::vector<CorpusEntry>& corpus_entries() {
  static const std::vector<CorpusEntry> entries = {
      {"notBordered", corpus_text::k_notBordered, false, Logic::PRED, "no proper prefix equals a proper suffix",
       [](const Word& w) { return !reference::bordered(w); }, 7},
      {"palindrome", corpus_text::k_palindrome, false, Logic::INCL, "palindromes", reference::palindrome, 8},
      {"notPalindrome", corpus_text::k_notPalindrome, false, Logic::INCL, "non-palindromes",
       [](const Word& w) { return !reference::palindrome(w); }, 8},
      {"firstLastA", corpus_text::k_firstLastA, false, Logic::PRED_DIO, "first and last letter are a",
       reference::first_last_a, 7},
      {"palindromeGrammar", corpus_text::k_palindromeGrammar, true, Logic::INCL,
       "linear conjunctive grammar of palindromes", reference::palindrome, 8},
  };
  return entries;
}

inline const CorpusEntry* find_entry(const std::string& name) {
  for (auto& e : corpus_entries())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace hornlab
