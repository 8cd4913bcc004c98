// Runs every word up to a length through several evaluation paths and
// reports the shortlex-first word on which they disagree.
#pragma once

#include <chrono>

#include "compile.hpp"
#include "fixpoint.hpp"
#include "grammar.hpp"
#include "normalize.hpp"

namespace hornlab {

inline const std::vector<std::string>& all_stages() {
  static const std::vector<std::string> s = {"oracle", "normalized", "grid", "automaton", "grammar-dual", "reference"};
  return s;
}

struct CrossCheckInput {
  std::string name;
  Formula formula;
  std::optional<Grammar> grammar;               // its language is the complement of the formula's
  std::function<bool(const Word&)> reference;  // language accepted by the formula
  NormalizeOptions normalize;
};

struct CrossCheckReport {
  std::string name;
  std::vector<std::string> stages;
  std::vector<std::string> skipped;  // requested but not applicable, with the reason
  long words = 0;
  std::optional<Word> counterexample;
  std::string counterexample_text;
  std::vector<std::pair<std::string, bool>> verdicts;  // at the counterexample
  std::string error;                                   // a stage failed to build or run
  double seconds = 0;
  bool agree() const { return error.empty() && !counterexample; }
};

inline CrossCheckReport crosscheck(const CrossCheckInput& in, int max_len, std::vector<std::string> stages) {
  auto t0 = std::chrono::steady_clock::now();
  CrossCheckReport rep;
  rep.name = in.name;
  if (stages.empty()) stages = all_stages();
  std::vector<std::pair<std::string, std::function<bool(const Word&)>>> run_stages;
  std::optional<Formula> normal;
  auto need_normal = [&]() -> const Formula& {
    if (!normal) normal = normalize(in.formula, in.normalize);
    return *normal;
  };
  std::string current;
  try {
    for (auto& s : stages) {
      current = s;
      if (s == "oracle") {
        run_stages.push_back({s, [&f = in.formula](const Word& w) { return accepts(f, w); }});
      } else if (s == "normalized") {
        const Formula& nf = need_normal();
        run_stages.push_back({s, [&nf](const Word& w) { return accepts(nf, w); }});
      } else if (s == "grid") {
        auto g = std::make_shared<GridCircuit>(compile_grid(need_normal()));
        run_stages.push_back({s, [g](const Word& w) { return run_grid(*g, w).accepted; }});
      } else if (s == "automaton" || s == "oia" || s == "ia" || s == "trellis") {
        auto ca = std::make_shared<CellularAutomaton>(compile_automaton(compile_grid(need_normal())));
        // naming the shape asserts that the formula compiles to it
        if (s != "automaton" && ca->kind != s) throw Error("formula compiles to " + ca->kind + ", not " + s);
        run_stages.push_back({s, [ca](const Word& w) { return accepts_realtime(*ca, w); }});
      } else if (s == "grammar-dual") {
        std::shared_ptr<Grammar> g;
        if (in.grammar) g = std::make_shared<Grammar>(*in.grammar);
        else if (in.formula.logic == Logic::INCL) g = std::make_shared<Grammar>(formula_to_grammar(need_normal()));
        else {
          rep.skipped.push_back(s + ": only for INCL formulas");
          continue;
        }
        run_stages.push_back({s, [g](const Word& w) { return !recognize(*g, w); }});
      } else if (s == "reference") {
        if (!in.reference) {
          rep.skipped.push_back(s + ": no reference decider for this input");
          continue;
        }
        run_stages.push_back({s, in.reference});
      } else {
        throw Error("unknown stage " + s);
      }
      rep.stages.push_back(s);
    }
    for (auto& w : shortlex_words(int(in.formula.alphabet.size()), max_len)) {
      ++rep.words;
      std::vector<std::pair<std::string, bool>> v;
      bool differ = false;
      for (auto& [name, f] : run_stages) {
        current = name;
        v.push_back({name, f(w)});
        differ = differ || v.back().second != v.front().second;
      }
      if (differ) {
        rep.counterexample = w;
        rep.counterexample_text = word_string(in.formula.alphabet, w);
        rep.verdicts = v;
        break;
      }
    }
  } catch (const std::exception& e) {
    rep.error = "stage " + current + ": " + e.what();
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline nlohmann::json report_json(const CrossCheckReport& r) {
  nlohmann::json j{{"name", r.name}, {"stages", r.stages}, {"skipped", r.skipped}, {"words", r.words},
                   {"agree", r.agree()}, {"seconds", r.seconds}};
  if (r.counterexample) {
    j["counterexample"] = r.counterexample_text;
    for (auto& [s, v] : r.verdicts) j["verdicts"][s] = v ? "accept" : "reject";
  }
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace hornlab
