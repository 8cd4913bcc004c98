// Linear conjunctive grammars in normal form: A -> s, or
// A -> s B1 & ... & s Bl & C1 t & ... & Cp t.
#pragma once

#include <sstream>

#include "normalize_common.hpp"
#include "text.hpp"

namespace hornlab {

struct Conjunct {
  bool prefix = true;  // s B when true, C t otherwise
  int letter = 0;
  int nt = 0;
  bool operator==(const Conjunct&) const = default;
  auto operator<=>(const Conjunct& o) const {
    // prefix conjuncts first, each group by nonterminal
    if (prefix != o.prefix) return prefix ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = nt <=> o.nt; c != 0) return c;
    return letter <=> o.letter;
  }
};

struct GrammarRule {
  int lhs = 0;
  int letter = -1;  // terminal rule A -> s when conj is empty
  std::vector<Conjunct> conj;
  bool operator==(const GrammarRule&) const = default;
  auto operator<=>(const GrammarRule&) const = default;
};

struct Grammar {
  std::vector<std::string> terminals;
  std::vector<std::string> nonterminals;
  int start = 0;
  std::vector<GrammarRule> rules;
};

inline void canonicalize(Grammar& g) {
  for (auto& r : g.rules) {
    std::sort(r.conj.begin(), r.conj.end());
    r.conj.erase(std::unique(r.conj.begin(), r.conj.end()), r.conj.end());
  }
  std::sort(g.rules.begin(), g.rules.end());
  g.rules.erase(std::unique(g.rules.begin(), g.rules.end()), g.rules.end());
}

inline std::string print_grammar(const Grammar& g) {
  std::ostringstream o;
  o << "terminals";
  for (auto& t : g.terminals) o << " " << t;
  o << "\nstart " << g.nonterminals[g.start] << "\n";
  for (int a = 0; a < int(g.nonterminals.size()); ++a) {
    std::vector<std::string> alts;
    for (auto& r : g.rules) {
      if (r.lhs != a) continue;
      if (r.conj.empty()) {
        alts.push_back(g.terminals[r.letter]);
        continue;
      }
      std::string s;
      for (auto& c : r.conj) {
        if (!s.empty()) s += " & ";
        s += c.prefix ? g.terminals[c.letter] + " " + g.nonterminals[c.nt]
                      : g.nonterminals[c.nt] + " " + g.terminals[c.letter];
      }
      alts.push_back(s);
    }
    if (alts.empty()) continue;
    o << g.nonterminals[a] << " ->";
    for (size_t i = 0; i < alts.size(); ++i) o << (i ? " | " : " ") << alts[i];
    o << "\n";
  }
  return o.str();
}

// Format: optional "terminals ..." line, "start A", then "A -> alt | alt ...".
// Without a terminals line every symbol that is never a left-hand side is a
// terminal. Tokens are separated by whitespace.
inline Grammar parse_grammar(const std::string& text) {
  struct Line {
    int no;
    std::vector<std::string> tok;
  };
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  for (int no = 1; std::getline(in, raw); ++no) {
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::istringstream ls(raw);
    Line l{no, {}};
    for (std::string t; ls >> t;) l.tok.push_back(t);
    if (!l.tok.empty()) lines.push_back(l);
  }
  auto fail = [](int no, const std::string& msg) -> Error {
    return Error("grammar line " + std::to_string(no) + ": " + msg);
  };
  Grammar g;
  std::string start;
  bool have_terminals = false;
  for (auto& l : lines) {
    if (l.tok[0] == "terminals") {
      g.terminals.assign(l.tok.begin() + 1, l.tok.end());
      have_terminals = true;
    } else if (l.tok[0] == "start") {
      if (l.tok.size() != 2) throw fail(l.no, "expected 'start NAME'");
      start = l.tok[1];
    } else {
      if (l.tok.size() < 3 || l.tok[1] != "->") throw fail(l.no, "expected 'A -> ...'");
      if (std::find(g.nonterminals.begin(), g.nonterminals.end(), l.tok[0]) == g.nonterminals.end())
        g.nonterminals.push_back(l.tok[0]);
    }
  }
  if (start.empty()) throw Error("grammar has no start line");
  auto nt_index = [&](const std::string& s) {
    auto it = std::find(g.nonterminals.begin(), g.nonterminals.end(), s);
    return it == g.nonterminals.end() ? -1 : int(it - g.nonterminals.begin());
  };
  auto t_index = [&](const std::string& s) {
    auto it = std::find(g.terminals.begin(), g.terminals.end(), s);
    return it == g.terminals.end() ? -1 : int(it - g.terminals.begin());
  };
  if (!have_terminals)
    for (auto& l : lines)
      if (l.tok.size() >= 3 && l.tok[1] == "->")
        for (size_t i = 2; i < l.tok.size(); ++i)
          if (l.tok[i] != "|" && l.tok[i] != "&" && nt_index(l.tok[i]) < 0 && t_index(l.tok[i]) < 0)
            g.terminals.push_back(l.tok[i]);
  for (auto& t : g.terminals)
    if (nt_index(t) >= 0) throw Error("symbol " + t + " is both a terminal and a nonterminal");
  if (g.terminals.empty()) throw Error("grammar has no terminals");
  g.start = nt_index(start);
  if (g.start < 0) throw Error("start symbol " + start + " has no rules");
  for (auto& l : lines) {
    if (l.tok.size() < 3 || l.tok[1] != "->") continue;
    int lhs = nt_index(l.tok[0]);
    std::vector<std::vector<std::string>> alts(1);
    for (size_t i = 2; i < l.tok.size(); ++i) {
      if (l.tok[i] == "|") alts.emplace_back();
      else alts.back().push_back(l.tok[i]);
    }
    for (auto& alt : alts) {
      GrammarRule r;
      r.lhs = lhs;
      if (alt.size() == 1) {
        r.letter = t_index(alt[0]);
        if (r.letter < 0) throw fail(l.no, "single-symbol alternative must be a terminal: " + alt[0]);
        g.rules.push_back(r);
        continue;
      }
      for (size_t i = 0; i < alt.size(); i += 3) {
        if (i + 1 >= alt.size() || (i + 2 < alt.size() && alt[i + 2] != "&"))
          throw fail(l.no, "conjuncts must look like 's B' or 'C t', joined by &");
        int t0 = t_index(alt[i]), n1 = nt_index(alt[i + 1]), n0 = nt_index(alt[i]), t1 = t_index(alt[i + 1]);
        if (t0 >= 0 && n1 >= 0) r.conj.push_back({true, t0, n1});
        else if (n0 >= 0 && t1 >= 0) r.conj.push_back({false, t1, n0});
        else throw fail(l.no, "conjunct '" + alt[i] + " " + alt[i + 1] + "' is not 's B' or 'C t'");
      }
      for (auto& c : r.conj)
        for (auto& d : r.conj)
          if (c.prefix == d.prefix && c.letter != d.letter)
            throw fail(l.no, std::string("all ") + (c.prefix ? "left" : "right") +
                                 " terminals of one alternative must be equal");
      g.rules.push_back(r);
    }
  }
  canonicalize(g);
  return g;
}

// table[A][a][b]: A derives w[a..b] (0-based, inclusive).
struct RecognizeResult {
  bool member = false;
  std::vector<std::vector<std::vector<uint8_t>>> table;
};

inline RecognizeResult recognize_table(const Grammar& g, const Word& w) {
  int n = int(w.size());
  if (n == 0) throw Error("empty word");
  for (int s : w)
    if (s < 0 || s >= int(g.terminals.size())) throw Error("letter outside the alphabet");
  int k = int(g.nonterminals.size());
  RecognizeResult r;
  r.table.assign(k, std::vector<std::vector<uint8_t>>(n, std::vector<uint8_t>(n, 0)));
  auto& T = r.table;
  for (int len = 1; len <= n; ++len)
    for (int a = 0; a + len - 1 < n; ++a) {
      int b = a + len - 1;
      for (auto& rule : g.rules) {
        if (T[rule.lhs][a][b]) continue;
        bool ok;
        if (rule.conj.empty()) {
          ok = len == 1 && w[a] == rule.letter;
        } else {
          ok = len >= 2;
          for (auto& c : rule.conj) {
            if (!ok) break;
            ok = c.prefix ? w[a] == c.letter && T[c.nt][a + 1][b] : w[b] == c.letter && T[c.nt][a][b - 1];
          }
        }
        if (ok) T[rule.lhs][a][b] = 1;
      }
    }
  r.member = T[g.start][0][n - 1];
  return r;
}

inline bool recognize(const Grammar& g, const Word& w) { return recognize_table(g, w).member; }

// The formula derives the start symbol on (1,n) exactly for words of L(G),
// so it accepts the complement.
inline Formula grammar_to_formula(const Grammar& g) {
  Formula f;
  f.logic = Logic::INCL;
  f.alphabet = g.terminals;
  f.preds = g.nonterminals;
  for (auto& r : g.rules) {
    if (r.conj.empty()) {
      f.clauses.push_back(make_clause({rel(Cmp::EQ), qlit(r.letter, tx())}, r.lhs));
      continue;
    }
    std::vector<Hyp> h{rel(Cmp::LT)};
    for (auto& c : r.conj) {
      if (c.prefix) {
        h.push_back(qlit(c.letter, tx()));
        h.push_back(atom(c.nt, tx(1), ty()));
      } else {
        h.push_back(qlit(c.letter, ty()));
        h.push_back(atom(c.nt, tx(), ty(-1)));
      }
    }
    std::sort(h.begin() + 1, h.end());
    h.erase(std::unique(h.begin() + 1, h.end()), h.end());
    f.clauses.push_back(make_clause(h, r.lhs));
  }
  f.clauses.push_back(make_false({minlit(tx()), maxlit(ty()), atom(g.start)}));
  validate_or_throw(f);
  return f;
}

inline Grammar formula_to_grammar(const Formula& f) {
  if (f.logic != Logic::INCL) throw Error("formula_to_grammar needs an INCL formula");
  // checked before is_normal so that this case gets its own message
  for (int ci = 0; ci < int(f.clauses.size()); ++ci) {
    const Clause& c = f.clauses[ci];
    if (!c.is_false && !has_comp(c) && !clause_has_q(c))
      throw Error("clause " + std::to_string(ci + 1) +
                  " has no computation hypothesis; a grammar rule needs at least one conjunct");
  }
  auto rep = is_normal(f);
  if (!rep.normal) {
    std::string why = rep.offenses.empty() ? "" : ": " + rep.offenses[0].second;
    throw Error("formula_to_grammar needs a normal formula" + why);
  }
  Grammar g;
  g.terminals = f.alphabet;
  g.nonterminals = f.preds;
  std::optional<int> start = f.bottom;
  for (int ci = 0; ci < int(f.clauses.size()); ++ci) {
    const Clause& c = f.clauses[ci];
    if (c.is_false) {
      for (auto& a : comps(c)) start = a.pred;
      continue;
    }
    std::vector<int> right, down;
    int letter = -1;
    for (auto& h : c.hyps) {
      if (auto a = as<CompAtom>(h)) (a->a1 == tx(1) ? right : down).push_back(a->pred);
      else if (auto l = as<InputLiteral>(h)) letter = l->letter;
    }
    if (letter >= 0) {
      g.rules.push_back({c.head, letter, {}});
      continue;
    }
    int sigma = int(f.alphabet.size());
    for (int s = 0; s < sigma; ++s)
      for (int t = 0; t < sigma; ++t) {
        GrammarRule r;
        r.lhs = c.head;
        for (int p : right) r.conj.push_back({true, s, p});
        for (int p : down) r.conj.push_back({false, t, p});
        g.rules.push_back(r);
      }
  }
  g.start = *start;
  canonicalize(g);
  return g;
}

}  // namespace hornlab
