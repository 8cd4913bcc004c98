// Cellular automata with lazily computed transitions, the simulator and the
// space-time diagram renderers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core.hpp"

namespace hornlab {

using State = std::string;

inline const State SHARP = "#";
inline const State LAMBDA = ".";
constexpr int END_LETTER = -1;  // fed to the first cell after the input in sequential mode

enum class InputMode { PARALLEL, SEQUENTIAL };
enum class OutputCell { FIRST, LAST };

// Transition cache shared by copies of one automaton. Lookups and insertions
// take the lock, so concurrent runs on distinct words are fine.
struct TransitionCache {
  std::mutex mu;
  std::map<std::vector<State>, State> delta;
  std::map<std::pair<std::vector<State>, int>, State> input;
};

struct CellularAutomaton {
  std::string kind;  // oia, trellis, ia, ca, oca
  std::vector<std::string> alphabet;
  std::vector<int> neighborhood;
  InputMode mode = InputMode::PARALLEL;
  OutputCell output = OutputCell::LAST;
  int deadline_a = 1, deadline_b = 0;  // deadline a*n + b
  std::vector<State> embed;            // parallel mode: letter -> state

  // Accepting states: an explicit set, or else bit 0 of the slot-th
  // '|'-separated component is '0' (compiled bit states, R_bot first).
  std::optional<std::set<State>> accept_states;
  int accept_slot = 0;

  std::function<State(const std::vector<State>&)> rule;
  std::function<State(const std::vector<State>&, int)> input_rule;  // sequential mode, letter or END_LETTER
  std::vector<State> states;  // finite state list when known up front (hand-built automata)

  nlohmann::json generator;  // how to rebuild the rules after import
  std::shared_ptr<TransitionCache> cache = std::make_shared<TransitionCache>();

  int deadline(int n) const { return deadline_a * n + deadline_b; }
  int output_cell(int n) const { return output == OutputCell::FIRST ? 1 : n; }

  bool accepting(const State& q) const {
    if (q == SHARP || q == LAMBDA) return false;
    if (accept_states) return accept_states->count(q) > 0;
    size_t start = 0;
    for (int i = 0; i < accept_slot; ++i) {
      start = q.find('|', start);
      if (start == std::string::npos) return false;
      ++start;
    }
    return start < q.size() && q[start] == '0';
  }

  State delta(const std::vector<State>& nb) const {
    {
      std::lock_guard lk(cache->mu);
      auto it = cache->delta.find(nb);
      if (it != cache->delta.end()) return it->second;
    }
    if (!rule) throw Error("no transition for this neighbourhood tuple");
    State r = rule(nb);
    std::lock_guard lk(cache->mu);
    cache->delta.emplace(nb, r);
    return r;
  }

  State delta_input(const std::vector<State>& nb, int letter) const {
    {
      std::lock_guard lk(cache->mu);
      auto it = cache->input.find({nb, letter});
      if (it != cache->input.end()) return it->second;
    }
    if (!input_rule) throw Error("sequential automaton without an input transition");
    State r = input_rule(nb, letter);
    std::lock_guard lk(cache->mu);
    cache->input.emplace(std::pair{nb, letter}, r);
    return r;
  }
};

struct SpaceTimeDiagram {
  std::string kind;
  int n = 0;
  int deadline = 0;
  int output_cell = 1;
  std::vector<std::vector<State>> rows;  // rows[t-1][c-1], cells 1..n; the margin is SHARP
  std::vector<State> output_trace;       // output cell at each time
  bool accepted = false;

  const State& at(int c, int t) const {
    if (c < 1 || c > n) return SHARP;
    return rows[t - 1][c - 1];
  }
};

inline void check_word(const CellularAutomaton& ca, const Word& w) {
  if (w.empty()) throw Error("empty word");
  for (int s : w)
    if (s < 0 || s >= int(ca.alphabet.size())) throw Error("letter outside the alphabet");
  if (ca.mode == InputMode::SEQUENTIAL && !ca.input_rule && ca.cache->input.empty())
    throw Error("sequential automaton without an input transition");
}

// Runs up to max(deadline, until) time steps.
inline SpaceTimeDiagram run(const CellularAutomaton& ca, const Word& w, int until = 0) {
  check_word(ca, w);
  int n = int(w.size());
  SpaceTimeDiagram d;
  d.kind = ca.kind;
  d.n = n;
  d.deadline = ca.deadline(n);
  d.output_cell = ca.output_cell(n);
  int steps = std::max(d.deadline, until);
  if (steps < 1) throw Error("deadline before the first time step");
  std::vector<State> prev;
  if (ca.mode == InputMode::PARALLEL) {
    prev.resize(n);
    for (int c = 0; c < n; ++c) prev[c] = ca.embed.at(w[c]);
  } else {
    prev.assign(n, LAMBDA);  // virtual row 0
  }
  auto cell = [&](const std::vector<State>& row, int c) -> const State& {
    return c < 1 || c > n ? SHARP : row[c - 1];
  };
  std::vector<State> nb(ca.neighborhood.size());
  for (int t = 1; t <= steps; ++t) {
    if (t > 1 || ca.mode == InputMode::SEQUENTIAL) {
      std::vector<State> next(n);
      for (int c = 1; c <= n; ++c) {
        for (size_t i = 0; i < nb.size(); ++i) nb[i] = cell(prev, c + ca.neighborhood[i]);
        if (ca.mode == InputMode::SEQUENTIAL && c == 1)
          next[0] = ca.delta_input(nb, t <= n ? w[t - 1] : END_LETTER);
        else
          next[c - 1] = ca.delta(nb);
      }
      prev = std::move(next);
    }
    d.rows.push_back(prev);
    d.output_trace.push_back(prev[d.output_cell - 1]);
  }
  d.accepted = ca.accepting(d.at(d.output_cell, d.deadline));
  return d;
}

inline bool accepts_realtime(const CellularAutomaton& ca, const Word& w) { return run(ca, w).accepted; }

// Verdict read at time t instead of the deadline.
inline bool accepts_at(const CellularAutomaton& ca, const Word& w, int t) {
  auto d = run(ca, w, t);
  return ca.accepting(d.at(d.output_cell, t));
}

// ---- rendering ----

inline char glyph(const CellularAutomaton& ca, const State& q) {
  if (q == SHARP) return '#';
  if (q == LAMBDA) return '.';
  return ca.accepting(q) ? '+' : '-';
}

// One line per time step: "t | glyphs", the output cell at the deadline in brackets.
inline std::string render_text(const CellularAutomaton& ca, const SpaceTimeDiagram& d) {
  std::ostringstream o;
  o << d.kind << " n=" << d.n << " deadline=" << d.deadline << " output=" << d.output_cell << "\n";
  for (int t = 1; t <= int(d.rows.size()); ++t) {
    o << (t < 10 ? " " : "") << t << " |";
    for (int c = 1; c <= d.n; ++c) {
      bool mark = t == d.deadline && c == d.output_cell;
      o << (mark ? '[' : ' ') << glyph(ca, d.at(c, t)) << (mark ? ']' : ' ');
    }
    o << "\n";
  }
  o << (d.accepted ? "accept" : "reject") << "\n";
  return o.str();
}

namespace detail {
constexpr int kCell = 40, kMargin = 30, kRadius = 9;

inline std::string svg_head(int w, int h) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << " " << h << "\">\n"
    << "<defs><marker id=\"arr\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" orient=\"auto\">"
    << "<path d=\"M0,0 L6,3 L0,6 z\" fill=\"#888\"/></marker></defs>\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return o.str();
}

inline void svg_node(std::ostringstream& o, int cx, int cy, const char* fill, const char* stroke, int width) {
  o << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << kRadius << "\" fill=\"" << fill << "\" stroke=\""
    << stroke << "\" stroke-width=\"" << width << "\"/>\n";
}

inline void svg_arrow(std::ostringstream& o, int x1, int y1, int x2, int y2) {
  // shorten both ends to the circle rims
  double dx = x2 - x1, dy = y2 - y1, len = std::sqrt(dx * dx + dy * dy);
  double ux = dx / len * (kRadius + 1), uy = dy / len * (kRadius + 1);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" marker-end=\"url(#arr)\"/>\n",
                x1 + ux, y1 + uy, x2 - ux, y2 - uy);
  o << buf;
}
}  // namespace detail

// Time grows upwards. Accepting states are white, rejecting ones black,
// quiescent cells are small dots and the SHARP margin is not drawn.
inline std::string render_svg(const CellularAutomaton& ca, const SpaceTimeDiagram& d) {
  using namespace detail;
  int T = int(d.rows.size());
  int W = 2 * kMargin + (d.n - 1) * kCell, H = 2 * kMargin + (T - 1) * kCell;
  auto px = [&](int c) { return kMargin + (c - 1) * kCell; };
  auto py = [&](int t) { return H - kMargin - (t - 1) * kCell; };
  std::ostringstream o;
  o << svg_head(W, H);
  for (int t = 2; t <= T; ++t)
    for (int c = 1; c <= d.n; ++c) {
      const State& q = d.at(c, t);
      if (q == SHARP || q == LAMBDA) continue;
      for (int v : ca.neighborhood) {
        const State& p = d.at(c + v, t - 1);
        if (p != SHARP && p != LAMBDA) svg_arrow(o, px(c + v), py(t - 1), px(c), py(t));
      }
    }
  for (int t = 1; t <= T; ++t)
    for (int c = 1; c <= d.n; ++c) {
      const State& q = d.at(c, t);
      if (q == SHARP) continue;
      if (q == LAMBDA) {
        o << "<circle cx=\"" << px(c) << "\" cy=\"" << py(t) << "\" r=\"2\" fill=\"#bbb\"/>\n";
        continue;
      }
      bool out = t == d.deadline && c == d.output_cell;
      svg_node(o, px(c), py(t), ca.accepting(q) ? "white" : "black", out ? "red" : "black", out ? 3 : 1);
    }
  o << "</svg>\n";
  return o.str();
}

// ---- JSON ----

inline nlohmann::json automaton_json(const CellularAutomaton& ca, bool dense_tables = true) {
  nlohmann::json j;
  j["kind"] = ca.kind;
  j["alphabet"] = ca.alphabet;
  j["neighborhood"] = ca.neighborhood;
  j["mode"] = ca.mode == InputMode::PARALLEL ? "parallel" : "sequential";
  j["output"] = ca.output == OutputCell::FIRST ? "first" : "last";
  j["deadline"] = {{"a", ca.deadline_a}, {"b", ca.deadline_b}};
  j["sentinels"] = {{"sharp", SHARP}, {"lambda", LAMBDA}};
  if (!ca.embed.empty()) j["embed"] = ca.embed;
  if (ca.accept_states) j["accept"] = {{"states", *ca.accept_states}};
  else j["accept"] = {{"slot", ca.accept_slot}, {"bit", 0}, {"value", "0"}};
  if (!ca.states.empty()) j["states"] = ca.states;
  if (!ca.generator.is_null()) j["generator"] = ca.generator;
  if (dense_tables) {
    std::lock_guard lk(ca.cache->mu);
    auto& tr = j["transitions"] = nlohmann::json::array();
    for (auto& [k, v] : ca.cache->delta) tr.push_back({{"in", k}, {"out", v}});
    auto& ti = j["input_transitions"] = nlohmann::json::array();
    for (auto& [k, v] : ca.cache->input)
      ti.push_back({{"in", k.first}, {"letter", k.second < 0 ? "$" : ca.alphabet[k.second]}, {"out", v}});
  }
  return j;
}

// Rebuilds the rules from a generator description; set by compile.hpp.
inline std::function<CellularAutomaton(const nlohmann::json&)>& generator_hook() {
  static std::function<CellularAutomaton(const nlohmann::json&)> h;
  return h;
}

inline CellularAutomaton automaton_from_json(const nlohmann::json& j) {
  CellularAutomaton ca;
  if (j.contains("generator") && generator_hook()) {
    ca = generator_hook()(j["generator"]);
  } else {
    ca.kind = j.at("kind").get<std::string>();
    ca.alphabet = j.at("alphabet").get<std::vector<std::string>>();
    ca.neighborhood = j.at("neighborhood").get<std::vector<int>>();
    ca.mode = j.at("mode") == "parallel" ? InputMode::PARALLEL : InputMode::SEQUENTIAL;
    ca.output = j.at("output") == "first" ? OutputCell::FIRST : OutputCell::LAST;
    ca.deadline_a = j.at("deadline").at("a");
    ca.deadline_b = j.at("deadline").at("b");
    if (j.contains("embed")) ca.embed = j["embed"].get<std::vector<State>>();
    if (j.contains("states")) ca.states = j["states"].get<std::vector<State>>();
    auto& acc = j.at("accept");
    if (acc.contains("states")) ca.accept_states = acc["states"].get<std::set<State>>();
    else ca.accept_slot = acc.at("slot");
  }
  // listed transitions win over the generator (they are what was exported)
  if (j.contains("transitions"))
    for (auto& e : j["transitions"]) ca.cache->delta[e.at("in").get<std::vector<State>>()] = e.at("out");
  if (j.contains("input_transitions"))
    for (auto& e : j["input_transitions"]) {
      std::string l = e.at("letter");
      int li = END_LETTER;
      if (l != "$") {
        auto it = std::find(ca.alphabet.begin(), ca.alphabet.end(), l);
        if (it == ca.alphabet.end()) throw Error("transition letter outside the alphabet: " + l);
        li = int(it - ca.alphabet.begin());
      }
      ca.cache->input[{e.at("in").get<std::vector<State>>(), li}] = e.at("out");
    }
  if (ca.neighborhood.empty()) throw Error("automaton without a neighbourhood");
  if (ca.mode == InputMode::PARALLEL && ca.embed.size() != ca.alphabet.size())
    throw Error("parallel automaton needs one embedded state per letter");
  return ca;
}

}  // namespace hornlab
