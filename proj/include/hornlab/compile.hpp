// Grid circuits to automata (OIA, trellis, IA), the CA <-> OCA shift, a few
// hand-built automata, and the way back from an automaton to a formula.
#pragma once

#include <array>

#include "automaton.hpp"
#include "grid.hpp"
#include "text.hpp"

namespace hornlab {

// ---- coordinate maps (site (x,y) <-> cell c at time t) ----

struct CellTime {
  int c, t;
  bool operator==(const CellTime&) const = default;
};
struct XY {
  int x, y;
  bool operator==(const XY&) const = default;
};

inline XY oia_site(CellTime p) { return {p.c, p.t - p.c + 1}; }
inline CellTime oia_cell(XY s) { return {s.x, s.x + s.y - 1}; }
inline XY trellis_site(CellTime p) { return {p.c - p.t + 1, p.c}; }
inline CellTime trellis_cell(XY s) { return {s.y, s.y - s.x + 1}; }
inline CellTime shift_cell(CellTime p) { return {p.c + p.t - 1, p.t}; }
inline CellTime unshift_cell(CellTime p) { return {p.c - p.t + 1, p.t}; }

// IA slots: 0=U1 1=U2 2=L1 3=L2. Upper slots hold sites with x<=y, lower ones x>=y.
inline XY ia_site(CellTime p, int slot) {
  int c = p.c, t = p.t;
  switch (slot) {
    case 0: return {t - c + 1, c + t - 1};
    case 1: return {t - c + 1, c + t};
    case 2: return {c + t - 1, t - c + 1};
    default: return {c + t, t - c + 1};
  }
}
inline std::pair<CellTime, int> ia_cell(XY s) {
  bool upper = s.x <= s.y;
  int lo = upper ? s.x : s.y, d = upper ? s.y - s.x : s.x - s.y;
  int c = d / 2 + 1, t = lo + c - 1;
  return {{c, t}, (upper ? 0 : 2) + d % 2};
}

inline std::vector<Bits> split_slots(const State& q) {
  std::vector<Bits> out;
  size_t s = 0;
  for (;;) {
    size_t e = q.find('|', s);
    out.push_back(q.substr(s, e == std::string::npos ? e : e - s));
    if (e == std::string::npos) break;
    s = e + 1;
  }
  return out;
}

namespace detail {
inline const Bits* bits_of(const State& q) { return q == SHARP || q == LAMBDA ? nullptr : &q; }
inline bool dead(const State& q) { return q == SHARP || q == LAMBDA; }

inline nlohmann::json grid_generator(const char* target, const GridCircuit& g) {
  return {{"type", "grid"}, {"target", target}, {"formula", print_formula(g.formula)}};
}
}  // namespace detail

// ---- compiled automata ----

// Cell c at time t holds site (c, t-c+1); the grid's own predecessor (x,y-1)
// is the cell itself one step earlier, (x-1,y) is its left neighbour.
inline CellularAutomaton grid_to_oia(const GridCircuit& g) {
  if (g.kind != GridKind::GRID1) throw Error("grid_to_oia needs a GRID1 circuit");
  auto gp = std::make_shared<GridCircuit>(g);
  CellularAutomaton ca;
  ca.kind = "oia";
  ca.alphabet = g.formula.alphabet;
  ca.neighborhood = {-1, 0};
  ca.mode = InputMode::SEQUENTIAL;
  ca.output = OutputCell::LAST;
  ca.deadline_a = 2;
  ca.deadline_b = -1;
  ca.rule = [gp](const std::vector<State>& nb) -> State {
    const State &left = nb[0], &own = nb[1];
    if (own == SHARP) return SHARP;
    if (detail::dead(left) && own == LAMBDA) return LAMBDA;
    SiteIn in;
    in.prev_x = detail::bits_of(left);
    in.prev_y = detail::bits_of(own);
    in.min_y = own == LAMBDA;
    return gp->local(in);
  };
  ca.input_rule = [gp](const std::vector<State>& nb, int letter) -> State {
    SiteIn in;
    in.prev_y = detail::bits_of(nb[1]);
    in.min_x = true;
    in.min_y = nb[1] == LAMBDA;
    in.letter = letter;
    return gp->local(in);
  };
  ca.generator = detail::grid_generator("oia", g);
  return ca;
}

// Cell y at time t holds site (y-t+1, y): the left neighbour brings (x,y-1),
// the cell itself (x+1,y). Cells whose x fell below 1 are dead.
inline CellularAutomaton grid_to_trellis(const GridCircuit& g) {
  if (g.kind != GridKind::GRID2) throw Error("grid_to_trellis needs a GRID2 circuit");
  auto gp = std::make_shared<GridCircuit>(g);
  CellularAutomaton ca;
  ca.kind = "trellis";
  ca.alphabet = g.formula.alphabet;
  ca.neighborhood = {-1, 0};
  ca.mode = InputMode::PARALLEL;
  ca.output = OutputCell::LAST;
  for (int s = 0; s < int(ca.alphabet.size()); ++s) {
    SiteIn in;
    in.letter = s;
    in.diag = true;
    ca.embed.push_back(g.local(in));
  }
  ca.rule = [gp](const std::vector<State>& nb) -> State {
    if (detail::dead(nb[0]) || detail::dead(nb[1])) return SHARP;
    SiteIn in;
    in.prev_x = &nb[1];
    in.prev_y = &nb[0];
    return gp->local(in);
  };
  ca.generator = detail::grid_generator("trellis", g);
  return ca;
}

// Cell c at time t keeps four sites, see ia_site. Two of them depend on the
// right neighbour's sites of the same instant (U1 and L1 of cell c+1), which
// are recomputed locally from the previous row.
inline CellularAutomaton grid_to_ia(const GridCircuit& g) {
  if (g.kind != GridKind::GRID3) throw Error("grid_to_ia needs a GRID3 circuit");
  auto gp = std::make_shared<GridCircuit>(g);
  auto step = [gp](const State& left, const State& own, const State& right, int letter, bool first) -> State {
    if (!first && detail::dead(left) && own == LAMBDA) return LAMBDA;
    if (own == SHARP) return SHARP;
    bool fresh = own == LAMBDA;
    std::vector<Bits> o, l, r;
    if (!fresh) o = split_slots(own);
    if (!first && !detail::dead(left)) l = split_slots(left);
    if (!detail::dead(right)) r = split_slots(right);
    if ((!fresh && o.size() != 4) || (!l.empty() && l.size() != 4) || (!r.empty() && r.size() != 4))
      throw Error("malformed IA state");
    const GridCircuit& c = *gp;
    SiteIn in;
    // U1
    in.prev_x = fresh ? nullptr : &o[1];
    in.prev_y = first ? (fresh ? nullptr : &o[3]) : (l.empty() ? nullptr : &l[1]);
    in.min_x = fresh;
    in.min_y = first && fresh;
    in.diag = first;
    in.letter = first ? letter : -1;
    Bits u1 = c.local(in);
    // U1 of the right neighbour, now
    Bits u1r;
    if (!fresh) {
      in = {};
      in.prev_x = r.empty() ? nullptr : &r[1];
      in.prev_y = &o[1];
      in.min_x = r.empty();
      u1r = c.local(in);
    }
    in = {};
    in.prev_x = fresh ? nullptr : &u1r;
    in.prev_y = &u1;
    in.min_x = fresh;
    Bits u2 = c.local(in);
    // lower track, mirrored
    Bits l1 = u1;
    if (!first) {
      in = {};
      in.prev_x = l.empty() ? nullptr : &l[3];
      in.prev_y = fresh ? nullptr : &o[3];
      in.min_y = fresh;
      l1 = c.local(in);
    }
    Bits l1r;
    if (!fresh) {
      in = {};
      in.prev_x = &o[3];
      in.prev_y = r.empty() ? nullptr : &r[3];
      in.min_y = r.empty();
      l1r = c.local(in);
    }
    in = {};
    in.prev_x = &l1;
    in.prev_y = fresh ? nullptr : &l1r;
    in.min_y = fresh;
    Bits l2 = c.local(in);
    return u1 + "|" + u2 + "|" + l1 + "|" + l2;
  };
  CellularAutomaton ca;
  ca.kind = "ia";
  ca.alphabet = g.formula.alphabet;
  ca.neighborhood = {-1, 0, 1};
  ca.mode = InputMode::SEQUENTIAL;
  ca.output = OutputCell::FIRST;
  ca.accept_slot = 0;
  ca.rule = [step](const std::vector<State>& nb) { return step(nb[0], nb[1], nb[2], -1, false); };
  ca.input_rule = [step](const std::vector<State>& nb, int letter) { return step(nb[0], nb[1], nb[2], letter, true); };
  ca.generator = detail::grid_generator("ia", g);
  return ca;
}

inline CellularAutomaton compile_automaton(const GridCircuit& g) {
  switch (g.kind) {
    case GridKind::GRID1: return grid_to_oia(g);
    case GridKind::GRID2: return grid_to_trellis(g);
    default: return grid_to_ia(g);
  }
}

// ---- CA {-1,0,1} <-> OCA {-2,-1,0} ----

// Cell c at time t of the CA sits at cell c+t-1 of the OCA. OCA cells whose
// CA cell fell off the left end become SHARP.
inline CellularAutomaton ca_to_oca_shift(const CellularAutomaton& ca) {
  if (ca.neighborhood != std::vector<int>{-1, 0, 1} || ca.mode != InputMode::PARALLEL || ca.output != OutputCell::FIRST)
    throw Error("shift needs a parallel CA with neighbourhood {-1,0,1} and output on the first cell");
  CellularAutomaton o = ca;
  o.cache = std::make_shared<TransitionCache>();
  o.kind = "oca";
  o.neighborhood = {-2, -1, 0};
  o.output = OutputCell::LAST;
  auto base = std::make_shared<CellularAutomaton>(ca);
  o.rule = [base](const std::vector<State>& nb) -> State {
    if (nb[1] == SHARP) return SHARP;
    return base->delta(nb);
  };
  o.generator = {{"type", "shift"}, {"of", ca.generator}};
  return o;
}

// Inverse direction. Exact for OCAs that kill cells whose middle neighbour is
// SHARP (which is what the shift produces).
inline CellularAutomaton oca_to_ca_unshift(const CellularAutomaton& oca) {
  if (oca.neighborhood != std::vector<int>{-2, -1, 0} || oca.mode != InputMode::PARALLEL ||
      oca.output != OutputCell::LAST)
    throw Error("unshift needs a parallel OCA with neighbourhood {-2,-1,0} and output on the last cell");
  CellularAutomaton c = oca;
  c.cache = std::make_shared<TransitionCache>();
  c.kind = "ca";
  c.neighborhood = {-1, 0, 1};
  c.output = OutputCell::FIRST;
  auto base = std::make_shared<CellularAutomaton>(oca);
  c.rule = [base](const std::vector<State>& nb) -> State {
    if (nb[2] == SHARP) return SHARP;
    return base->delta(nb);
  };
  c.generator = {{"type", "unshift"}, {"of", oca.generator}};
  return c;
}

// ---- hand-built automata ----

// State: parity of the a's seen so far, then the letter travelling left
// ('-' once the word is used up). Cell 1 at time n has read the whole word.
inline CellularAutomaton parity_ca() {
  CellularAutomaton ca;
  ca.kind = "ca";
  ca.alphabet = {"a", "b"};
  ca.neighborhood = {-1, 0, 1};
  ca.output = OutputCell::FIRST;
  ca.embed = {"1a", "0b"};
  ca.states = {"0a", "0b", "0-", "1a", "1b", "1-"};
  ca.accept_states = std::set<State>{"0a", "0b", "0-"};
  ca.rule = [](const std::vector<State>& nb) -> State {
    const State& own = nb[1];
    if (own == SHARP) return SHARP;
    char l = nb[2] == SHARP ? '-' : nb[2][1];
    char p = own[0] == (l == 'a' ? '0' : '1') ? '1' : '0';
    return {p, l};
  };
  ca.generator = {{"type", "builtin"}, {"name", "parity"}};
  return ca;
}

// Cell y at time t holds the factor w[y-t+1..y] as (first letter, last
// letter, is a palindrome, left predecessor is a palindrome).
inline CellularAutomaton palindrome_trellis() {
  CellularAutomaton ca;
  ca.kind = "trellis";
  ca.alphabet = {"a", "b"};
  ca.neighborhood = {-1, 0};
  ca.output = OutputCell::LAST;
  ca.embed = {"aa11", "bb11"};
  std::set<State> acc;
  for (char f : {'a', 'b'})
    for (char l : {'a', 'b'})
      for (char p : {'0', '1'})
        for (char q : {'0', '1'}) {
          State s{f, l, p, q};
          ca.states.push_back(s);
          if (p == '1') acc.insert(s);
        }
  ca.accept_states = acc;
  ca.rule = [](const std::vector<State>& nb) -> State {
    const State &left = nb[0], &own = nb[1];
    if (detail::dead(left) || detail::dead(own)) return SHARP;
    char f = left[0], l = own[1];
    return {f, l, f == l && own[3] == '1' ? '1' : '0', left[2]};
  };
  ca.generator = {{"type", "builtin"}, {"name", "palindrome-trellis"}};
  return ca;
}

// Every cell keeps its state; accepts iff the first letter is in `accepting`.
inline CellularAutomaton identity_ca(std::vector<std::string> alphabet, std::set<State> accepting) {
  CellularAutomaton ca;
  ca.kind = "ca";
  ca.alphabet = alphabet;
  ca.neighborhood = {-1, 0, 1};
  ca.output = OutputCell::FIRST;
  ca.embed = alphabet;
  ca.states = alphabet;
  ca.accept_states = std::move(accepting);
  ca.rule = [](const std::vector<State>& nb) { return nb[1]; };
  ca.generator = {{"type", "builtin"}, {"name", "identity"}, {"alphabet", alphabet}, {"accept", *ca.accept_states}};
  return ca;
}

inline CellularAutomaton one_state_ca(std::vector<std::string> alphabet) {
  CellularAutomaton ca;
  ca.kind = "ca";
  ca.alphabet = alphabet;
  ca.neighborhood = {-1, 0, 1};
  ca.output = OutputCell::FIRST;
  ca.embed.assign(alphabet.size(), "q");
  ca.states = {"q"};
  ca.accept_states = std::set<State>{"q"};
  ca.rule = [](const std::vector<State>& nb) { return nb[1]; };
  ca.generator = {{"type", "builtin"}, {"name", "one-state"}, {"alphabet", alphabet}};
  return ca;
}

inline CellularAutomaton automaton_from_generator(const nlohmann::json& g) {
  std::string type = g.at("type");
  if (type == "grid") {
    Formula f = parse_formula_or_throw(g.at("formula").get<std::string>());
    GridCircuit c = compile_grid(f);
    std::string t = g.at("target");
    if (t == "oia") return grid_to_oia(c);
    if (t == "trellis") return grid_to_trellis(c);
    if (t == "ia") return grid_to_ia(c);
    throw Error("unknown grid target " + t);
  }
  if (type == "shift") return ca_to_oca_shift(automaton_from_generator(g.at("of")));
  if (type == "unshift") return oca_to_ca_unshift(automaton_from_generator(g.at("of")));
  if (type == "builtin") {
    std::string n = g.at("name");
    if (n == "parity") return parity_ca();
    if (n == "palindrome-trellis") return palindrome_trellis();
    if (n == "identity") return identity_ca(g.at("alphabet"), g.at("accept"));
    if (n == "one-state") return one_state_ca(g.at("alphabet"));
    throw Error("unknown builtin automaton " + n);
  }
  throw Error("unknown generator type " + type);
}

inline const bool kGeneratorHookSet = (generator_hook() = automaton_from_generator, true);

// ---- filling the transition cache ----

// Closes the state set under the transitions, evaluating every neighbourhood
// tuple over the states found so far. Gives up (returns false) when a round
// would need more than `cap` tuples.
inline bool materialize(const CellularAutomaton& ca, size_t cap = size_t(1) << 20) {
  bool seq = ca.mode == InputMode::SEQUENTIAL;
  size_t k = ca.neighborhood.size();
  int left = -1;
  for (size_t i = 0; i < k; ++i)
    if (ca.neighborhood[i] == -1) left = int(i);
  std::set<State> pool{SHARP};
  if (seq) pool.insert(LAMBDA);
  for (auto& s : ca.embed) pool.insert(s);
  for (auto& s : ca.states) pool.insert(s);
  for (;;) {
    std::vector<State> P(pool.begin(), pool.end());
    size_t total = 1;
    for (size_t i = 0; i < k; ++i) {
      total *= P.size();
      if (total > cap) return false;
    }
    std::set<State> found;
    std::vector<size_t> idx(k, 0);
    std::vector<State> nb(k);
    for (size_t it = 0; it < total; ++it) {
      for (size_t i = 0; i < k; ++i) nb[i] = P[idx[i]];
      bool at_left = left >= 0 && nb[left] == SHARP;
      if (!seq || !at_left) found.insert(ca.delta(nb));
      if (seq && at_left)
        for (int s = END_LETTER; s < int(ca.alphabet.size()); ++s) found.insert(ca.delta_input(nb, s));
      for (size_t i = k; i-- > 0;) {
        if (++idx[i] < P.size()) break;
        idx[i] = 0;
      }
    }
    size_t before = pool.size();
    pool.insert(found.begin(), found.end());
    if (pool.size() == before) return true;
  }
}

// Runs every word up to max_len so that the cache holds each transition used
// on those words.
inline void warm(const CellularAutomaton& ca, int max_len) {
  for (auto& w : shortlex_words(int(ca.alphabet.size()), max_len)) run(ca, w);
}

// ---- automaton -> formula ----

struct FromCaOptions {
  int warm_length = 0;  // 0: the transition table must close (materialize)
  size_t cap = size_t(1) << 20;
};

struct FromCaResult {
  Formula formula;
  bool complete = true;  // false: only exact on words up to warm_length
  std::string construction;
};

namespace detail {

struct FormulaBuilder {
  Formula f;
  std::map<State, int> pred;
  const CellularAutomaton* ca = nullptr;

  int R(const State& q) {
    auto it = pred.find(q);
    if (it != pred.end()) return it->second;
    int i = f.add_pred(q == SHARP ? "R_sharp" : "R_q" + std::to_string(pred.size() - pred.count(SHARP)));
    pred[q] = i;
    return i;
  }
  void add(std::vector<Hyp> h, const State& out) { f.clauses.push_back(make_clause(std::move(h), R(out))); }
  void contradictions(std::vector<Hyp> at_output) {
    std::vector<State> qs;
    for (auto& [q, _] : pred) qs.push_back(q);
    for (auto& q : qs)
      if (!ca->accepting(q)) {
        auto h = at_output;
        h.push_back(atom(pred[q]));
        f.clauses.push_back(make_false(h));
      }
  }
};

inline std::vector<std::pair<std::vector<State>, State>> table(const CellularAutomaton& ca) {
  std::lock_guard lk(ca.cache->mu);
  return {ca.cache->delta.begin(), ca.cache->delta.end()};
}
inline std::vector<std::pair<std::pair<std::vector<State>, int>, State>> input_table(const CellularAutomaton& ca) {
  std::lock_guard lk(ca.cache->mu);
  return {ca.cache->input.begin(), ca.cache->input.end()};
}

// OCA {-2,-1,0}: x is the cell, y the time.
inline Formula oca_formula(const CellularAutomaton& ca) {
  FormulaBuilder b;
  b.ca = &ca;
  b.f.logic = Logic::PRED;
  b.f.alphabet = ca.alphabet;
  for (int s = 0; s < int(ca.alphabet.size()); ++s) b.add({minlit(ty()), qlit(s, tx())}, ca.embed[s]);
  for (auto& [nb, out] : table(ca)) {
    const State &a = nb[0], &m = nb[1], &c = nb[2];
    if (c == LAMBDA || m == LAMBDA || a == LAMBDA) continue;
    if (a == SHARP && m == SHARP)
      b.add({minlit(tx()), minlit(ty(), false), atom(b.R(c), tx(), ty(-1))}, out);
    if (a == SHARP)
      b.add({minlit(tx(-1)), minlit(tx(), false), minlit(ty(), false), atom(b.R(m), tx(-1), ty(-1)),
             atom(b.R(c), tx(), ty(-1))},
            out);
    b.add({minlit(tx(), false), minlit(tx(-1), false), minlit(ty(), false), atom(b.R(a), tx(-2), ty(-1)),
           atom(b.R(m), tx(-1), ty(-1)), atom(b.R(c), tx(), ty(-1))},
          out);
  }
  b.contradictions({maxlit(tx()), maxlit(ty())});
  return b.f;
}

// Trellis: site (x,y) is cell y at time y-x+1.
inline Formula trellis_formula(const CellularAutomaton& ca) {
  FormulaBuilder b;
  b.ca = &ca;
  b.f.logic = Logic::INCL;
  b.f.alphabet = ca.alphabet;
  for (int s = 0; s < int(ca.alphabet.size()); ++s) b.add({rel(Cmp::EQ), qlit(s, tx())}, ca.embed[s]);
  for (auto& [nb, out] : table(ca)) {
    if (dead(nb[0]) || dead(nb[1])) continue;
    b.add({rel(Cmp::LT), atom(b.R(nb[0]), tx(), ty(-1)), atom(b.R(nb[1]), tx(1), ty())}, out);
  }
  b.contradictions({minlit(tx()), maxlit(ty())});
  return b.f;
}

// OIA: site (x,y) is cell x at time x+y-1.
inline Formula oia_formula(const CellularAutomaton& ca) {
  FormulaBuilder b;
  b.ca = &ca;
  b.f.logic = Logic::PRED;
  b.f.alphabet = ca.alphabet;
  for (auto& [key, out] : input_table(ca)) {
    auto& [nb, s] = key;
    if (s == END_LETTER || nb[0] != SHARP || nb[1] == SHARP) continue;
    if (nb[1] == LAMBDA) b.add({minlit(tx()), minlit(ty()), qlit(s, ty())}, out);
    else b.add({minlit(tx()), minlit(ty(), false), qlit(s, ty()), atom(b.R(nb[1]), tx(), ty(-1))}, out);
  }
  for (auto& [nb, out] : table(ca)) {
    if (dead(nb[0]) || nb[1] == SHARP) continue;
    if (nb[1] == LAMBDA) b.add({minlit(tx(), false), minlit(ty()), atom(b.R(nb[0]), tx(-1), ty())}, out);
    else
      b.add({minlit(tx(), false), minlit(ty(), false), atom(b.R(nb[0]), tx(-1), ty()), atom(b.R(nb[1]), tx(), ty(-1))},
            out);
  }
  b.contradictions({maxlit(tx()), maxlit(ty())});
  return b.f;
}

// IA: site (x,y) is cell y-x+1 at time y; sites with x>y stand for cells left
// of the tape and derive R_sharp. Cell c sees its right neighbour quiescent
// until time c, except the last cell whose right neighbour is the margin.
inline Formula ia_formula(const CellularAutomaton& ca) {
  FormulaBuilder b;
  b.ca = &ca;
  b.f.logic = Logic::PRED_DIO;
  b.f.alphabet = ca.alphabet;
  int sharp = b.R(SHARP);
  b.f.clauses.push_back(make_clause({minlit(ty()), minlit(tx(), false)}, sharp));
  b.f.clauses.push_back(make_clause({minlit(tx(), false), minlit(ty(), false), atom(sharp, tx(-1), ty(-1))}, sharp));
  for (auto& [key, out] : input_table(ca)) {
    auto& [nb, s] = key;
    const State &own = nb[1], &right = nb[2];
    if (s == END_LETTER || nb[0] != SHARP || own == SHARP) continue;
    std::vector<Hyp> h{rel(Cmp::EQ), qlit(s, tx())};
    if (own == LAMBDA) {
      if (right == SHARP) h.push_back(maxlit(ty()));
      else if (right == LAMBDA) h.push_back(maxlit(ty(), false));
      else continue;
      h.push_back(minlit(tx()));
    } else if (right == LAMBDA) {
      h.insert(h.end(), {minlit(tx(-1)), minlit(tx(), false), atom(b.R(own), tx(-1), ty(-1))});
    } else if (right != SHARP) {
      h.insert(h.end(), {minlit(tx(), false), minlit(tx(-1), false), atom(b.R(own), tx(-1), ty(-1)),
                         atom(b.R(right), tx(-2), ty(-1))});
    } else {
      continue;
    }
    b.add(h, out);
  }
  for (auto& [nb, out] : table(ca)) {
    const State &left = nb[0], &own = nb[1], &right = nb[2];
    if (dead(left) || own == SHARP) continue;
    std::vector<Hyp> h{minlit(ty(), false), atom(b.R(left), tx(), ty(-1))};
    if (own == LAMBDA) {
      if (right == SHARP) h.push_back(maxlit(ty()));
      else if (right == LAMBDA) h.push_back(maxlit(ty(), false));
      else continue;
      h.push_back(minlit(tx()));
    } else if (right == LAMBDA) {
      h.insert(h.end(), {minlit(tx(-1)), minlit(tx(), false), atom(b.R(own), tx(-1), ty(-1))});
    } else if (right != SHARP) {
      h.insert(h.end(), {minlit(tx(), false), minlit(tx(-1), false), atom(b.R(own), tx(-1), ty(-1)),
                         atom(b.R(right), tx(-2), ty(-1))});
    } else {
      continue;
    }
    b.add(h, out);
  }
  b.contradictions({maxlit(tx()), maxlit(ty())});
  return b.f;
}

}  // namespace detail

inline FromCaResult formula_from_ca_ex(const CellularAutomaton& input, const FromCaOptions& opt = {}) {
  using V = std::vector<int>;
  const auto& N = input.neighborhood;
  bool par = input.mode == InputMode::PARALLEL;
  bool first = input.output == OutputCell::FIRST;
  auto need_deadline = [&](int a, int b) {
    if (input.deadline_a != a || input.deadline_b != b) throw Error("automaton does not have the real-time deadline");
  };
  FromCaResult r;
  CellularAutomaton ca = input;
  enum { OCA, TRELLIS, OIA, IA } shape;
  if (N == V{-1, 0, 1} && par && first) {
    need_deadline(1, 0);
    ca = ca_to_oca_shift(input);
    shape = OCA;
    r.construction = "ca -> oca shift -> pred";
  } else if (N == V{-2, -1, 0} && par && !first) {
    need_deadline(1, 0);
    shape = OCA;
    r.construction = "oca -> pred";
  } else if (N == V{-1, 0} && par && !first) {
    need_deadline(1, 0);
    shape = TRELLIS;
    r.construction = "trellis -> incl";
  } else if (N == V{-1, 0} && !par && !first) {
    need_deadline(2, -1);
    shape = OIA;
    r.construction = "oia -> pred";
  } else if (N == V{-1, 0, 1} && !par && first) {
    need_deadline(1, 0);
    shape = IA;
    r.construction = "ia -> pred-dio";
  } else {
    throw Error("unsupported automaton shape");
  }
  if (!materialize(ca, opt.cap)) {
    if (opt.warm_length <= 0)
      throw Error("transition table does not close within the cap; pass a warm length to build a bounded formula");
    warm(ca, opt.warm_length);
    r.complete = false;
  }
  switch (shape) {
    case OCA: r.formula = detail::oca_formula(ca); break;
    case TRELLIS: r.formula = detail::trellis_formula(ca); break;
    case OIA: r.formula = detail::oia_formula(ca); break;
    case IA: r.formula = detail::ia_formula(ca); break;
  }
  auto rep = validate(r.formula);
  if (!rep.ok()) throw Error("internal: generated formula does not validate: " + rep.diags[0].message);
  return r;
}

inline Formula formula_from_ca(const CellularAutomaton& ca, const FromCaOptions& opt = {}) {
  return formula_from_ca_ex(ca, opt).formula;
}

// ---- site matrices ----

// Rows from y=n down to 1, columns x=1..n: '*' where R_bot holds, 'o'
// elsewhere, blank outside the domain; the output site in brackets.
inline std::string render_grid_text(const GridCircuit& g, const GridRun& r) {
  std::ostringstream o;
  auto [ox, oy] = grid_output(g.kind, r.n);
  o << grid_kind_name(g.kind) << " n=" << r.n << "\n";
  for (int y = r.n; y >= 1; --y) {
    o << (y < 10 ? " " : "") << y << " |";
    for (int x = 1; x <= r.n; ++x) {
      const Bits& b = r.at(x, y);
      char c = b.empty() ? ' ' : b[0] == '1' ? '*' : 'o';
      bool out = x == ox && y == oy;
      o << (out ? '[' : ' ') << c << (out ? ']' : ' ');
    }
    o << "\n";
  }
  o << (r.accepted ? "accept" : "reject") << "\n";
  return o.str();
}

// Sites as circles, x to the right and y upwards. `on(x,y)` selects the
// filled sites; arrows join filled sites along the steps in `arrows`.
inline std::string render_sites_svg(int n, const std::function<int(int, int)>& on,
                                    const std::vector<std::pair<int, int>>& arrows, std::pair<int, int> output) {
  using namespace detail;
  int W = 2 * kMargin + (n - 1) * kCell, H = W;
  auto px = [&](int x) { return kMargin + (x - 1) * kCell; };
  auto py = [&](int y) { return H - kMargin - (y - 1) * kCell; };
  std::ostringstream o;
  o << svg_head(W, H);
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y)
      for (auto [dx, dy] : arrows) {
        int sx = x - dx, sy = y - dy;
        if (sx >= 1 && sy >= 1 && sx <= n && sy <= n && on(x, y) == 1 && on(sx, sy) == 1)
          svg_arrow(o, px(sx), py(sy), px(x), py(y));
      }
  for (int x = 1; x <= n; ++x)
    for (int y = 1; y <= n; ++y) {
      int v = on(x, y);
      if (v < 0) continue;
      bool out = x == output.first && y == output.second;
      svg_node(o, px(x), py(y), v ? "black" : "white", out ? "red" : "black", out ? 3 : 1);
    }
  o << "</svg>\n";
  return o.str();
}

inline std::string render_grid_svg(const GridCircuit& g, const GridRun& r) {
  auto on = [&](int x, int y) {
    const Bits& b = r.at(x, y);
    return b.empty() ? -1 : b[0] == '1';
  };
  std::vector<std::pair<int, int>> arrows =
      g.kind == GridKind::GRID2 ? std::vector<std::pair<int, int>>{{-1, 0}, {0, 1}}
                                : std::vector<std::pair<int, int>>{{1, 0}, {0, 1}};
  return render_sites_svg(r.n, on, arrows, grid_output(g.kind, r.n));
}

}  // namespace hornlab
