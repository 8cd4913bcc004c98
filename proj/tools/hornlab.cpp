// hornlab command line. Exit codes: 0 accept / success, 1 reject / check
// failed, 2 usage or input error.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hornlab/compile.hpp"
#include "hornlab/corpus.hpp"
#include "hornlab/crosscheck.hpp"

using namespace hornlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool g_json = false;
uint64_t g_seed = 0;  // 0 keeps the clause order of the file

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// A .horn file, a .lcg grammar (its formula), or a corpus entry name.
struct Source {
  std::string name;
  Formula formula;
  std::optional<Grammar> grammar;
  std::function<bool(const Word&)> reference;
  int max_len = 7;
};

Source load_source(const std::string& arg) {
  Source s;
  s.name = arg;
  std::string text;
  bool grammar = ends_with(arg, ".lcg");
  if (fs::exists(arg)) {
    text = read_file(arg);
  } else if (auto e = find_entry(arg)) {
    text = e->source;
    grammar = e->is_grammar;
    s.max_len = e->max_len;
    // the formula of a grammar accepts the complement of its language
    s.reference = e->is_grammar ? std::function<bool(const Word&)>([r = e->reference](const Word& w) { return !r(w); })
                                : e->reference;
  } else {
    throw Error("no such file or corpus entry: " + arg);
  }
  if (grammar) {
    s.grammar = parse_grammar(text);
    s.formula = grammar_to_formula(*s.grammar);
  } else {
    auto r = parse_formula(text);
    if (!r.ok()) {
      std::string msg;
      for (auto& d : r.diags)
        if (d.error) msg += "\n  line " + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " + d.message;
      throw Error("formula does not parse:" + msg);
    }
    s.formula = *r.formula;
  }
  if (s.formula.logic == Logic::INCL) s.max_len = std::max(s.max_len, 8);
  return s;
}

Word read_word(const Formula& f, const std::string& text) { return parse_word(f.alphabet, text); }

Formula ensure_normal(const Formula& f) { return is_normal(f).normal ? f : normalize(f); }

void emit(const json& j, const std::string& text) {
  if (g_json) std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

CellularAutomaton load_automaton(const std::string& arg) {
  if (ends_with(arg, ".json")) return automaton_from_json(json::parse(read_file(arg)));
  return compile_automaton(compile_grid(ensure_normal(load_source(arg).formula)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hornlab: Horn logics over words, normal forms, grids and cellular automata"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "structured output");
  app.add_option("--seed", g_seed, "seed for a randomized clause order during evaluation (0: file order)");
  int code = 0;

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "parse and check a formula");
  std::string v_file;
  validate_cmd->add_option("file", v_file)->required();
  validate_cmd->callback([&] {
    std::string text = read_file(v_file);
    auto r = parse_formula(text);
    json j{{"ok", r.ok()}, {"diagnostics", json::array()}};
    std::string out;
    for (auto& d : r.diags) {
      j["diagnostics"].push_back({{"line", d.span.line}, {"column", d.span.column}, {"rule", d.rule},
                                  {"message", d.message}, {"error", d.error}});
      out += v_file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
             (d.error ? "error" : "note") + " [" + d.rule + "] " + d.message + "\n";
    }
    if (r.ok()) {
      auto nr = is_normal(*r.formula);
      j["logic"] = logic_name(r.formula->logic);
      j["normal"] = nr.normal;
      out += std::string("ok, ") + logic_name(r.formula->logic) + (nr.normal ? ", normal form" : "") + "\n";
    }
    emit(j, out);
    code = r.ok() ? 0 : 1;
  });

  // accept
  auto* accept_cmd = app.add_subcommand("accept", "decide a word with the least-model oracle");
  std::string a_src, a_word;
  bool a_model = false;
  accept_cmd->add_option("source", a_src)->required();
  accept_cmd->add_option("word", a_word)->required();
  accept_cmd->add_flag("--model", a_model, "dump the least model as a JSON grid per predicate");
  accept_cmd->callback([&] {
    Source s = load_source(a_src);
    Word w = read_word(s.formula, a_word);
    Model m = evaluate(s.formula, w, {g_seed});
    bool acc = !m.bottom_derived;
    json j{{"word", a_word}, {"accept", acc}};
    if (a_model) {
      // grid[x-1][y-1] is 1 when P(x,y) holds
      for (int p = 0; p < m.m; ++p) {
        json grid = json::array();
        for (int x = 1; x <= m.n; ++x) {
          json row = json::array();
          for (int y = 1; y <= m.n; ++y) row.push_back(int(m.get(p, x, y)));
          grid.push_back(row);
        }
        j["model"][s.formula.preds[p]] = grid;
      }
      std::cout << j.dump(2) << "\n";
    } else {
      emit(j, std::string(acc ? "accept" : "reject") + "\n");
    }
    code = acc ? 0 : 1;
  });

  // lang
  auto* lang_cmd = app.add_subcommand("lang", "list the accepted words up to a length");
  std::string l_src;
  int l_max = 6;
  lang_cmd->add_option("source", l_src)->required();
  lang_cmd->add_option("--max-len", l_max, "longest word")->check(CLI::Range(1, kEnumerateCap));
  lang_cmd->callback([&] {
    Source s = load_source(l_src);
    auto words = enumerate_language(s.formula, l_max);
    json j = json::array();
    std::string out;
    for (auto& w : words) {
      j.push_back(word_string(s.formula.alphabet, w));
      out += word_string(s.formula.alphabet, w) + "\n";
    }
    emit({{"max_len", l_max}, {"words", j}}, out);
  });

  // normalize
  auto* norm_cmd = app.add_subcommand("normalize", "rewrite a formula into its normal form");
  std::string n_src, n_trace, n_out, n_stop_text;
  bool n_full = false;
  norm_cmd->add_option("source", n_src)->required();
  norm_cmd->add_option("--trace", n_trace, "directory for one formula file per step");
  norm_cmd->add_option("--stop-after", n_stop_text, "stop after this step (N or stepN)");
  norm_cmd->add_flag("--full-subsets", n_full, "emit all group subsets in the last step");
  norm_cmd->add_option("-o,--output", n_out, "write the result here");
  norm_cmd->callback([&] {
    Source s = load_source(n_src);
    NormalizeOptions opt;
    if (!n_stop_text.empty()) {
      std::string digits = n_stop_text.rfind("step", 0) == 0 ? n_stop_text.substr(4) : n_stop_text;
      if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || std::stoi(digits) < 1)
        throw Error("--stop-after expects N or stepN, got " + n_stop_text);
      opt.stop_after = std::stoi(digits);
    }
    opt.full_subsets = n_full;
    auto r = normalize_traced(s.formula, opt);
    if (!n_trace.empty()) {
      fs::create_directories(n_trace);
      for (auto& st : r.trace) write_file((fs::path(n_trace) / (st.name + ".horn")).string(), print_formula(st.formula));
    }
    std::string text = print_formula(r.formula);
    if (!n_out.empty()) write_file(n_out, text);
    json steps = json::array();
    for (auto& st : r.trace) steps.push_back({{"name", st.name}, {"predicates", st.preds}, {"clauses", st.clauses}});
    json j{{"formula", formula_json(r.formula)}, {"normal", is_normal(r.formula).normal}, {"steps", steps},
           {"extension", r.extension},
           {"k_blocks", {{"runs", r.kstats.runs}, {"max_groups", r.kstats.max_groups}, {"max_block", r.kstats.max_block}}}};
    emit(j, n_out.empty() ? text : "");
  });

  // compile
  auto* comp_cmd = app.add_subcommand("compile", "compile a formula to a cellular automaton (JSON)");
  std::string c_src, c_out;
  bool c_dense = false;
  int c_warm = 0;
  comp_cmd->add_option("source", c_src)->required();
  comp_cmd->add_option("-o,--output", c_out, "automaton JSON file");
  comp_cmd->add_flag("--export-dense", c_dense, "materialize the full transition table (at most 12 predicates)");
  comp_cmd->add_option("--warm", c_warm, "also list the transitions used on all words up to this length");
  comp_cmd->callback([&] {
    Formula nf = ensure_normal(load_source(c_src).formula);
    GridCircuit g = compile_grid(nf);
    CellularAutomaton ca = compile_automaton(g);
    if (c_dense) {
      if (g.m > 12) throw Error("--export-dense needs at most 12 predicates, this circuit has " + std::to_string(g.m));
      if (!materialize(ca)) throw Error("transition table does not close within 2^20 tuples");
    }
    if (c_warm > 0) warm(ca, c_warm);
    json j = automaton_json(ca, c_dense || c_warm > 0);
    if (!c_out.empty()) write_file(c_out, j.dump(1) + "\n");
    std::string summary = ca.kind + ": " + std::to_string(g.m) + " predicates, " +
                          std::to_string(j.value("transitions", json::array()).size()) + " listed transitions\n";
    if (c_out.empty() && !g_json) std::cout << j.dump(1) << "\n";
    else emit(j, summary);
  });

  // run
  auto* run_cmd = app.add_subcommand("run", "simulate an automaton on a word");
  std::string r_src, r_word, r_svg;
  bool r_text = false;
  run_cmd->add_option("automaton", r_src, "automaton JSON, formula file or corpus name")->required();
  run_cmd->add_option("word", r_word)->required();
  run_cmd->add_option("--diagram", r_svg, "write the space-time diagram as SVG");
  run_cmd->add_flag("--text", r_text, "print the space-time diagram");
  run_cmd->callback([&] {
    CellularAutomaton ca = load_automaton(r_src);
    Word w = parse_word(ca.alphabet, r_word);
    auto d = run(ca, w);
    if (!r_svg.empty()) write_file(r_svg, render_svg(ca, d));
    json rows = json::array();
    for (auto& row : d.rows) rows.push_back(row);
    json j{{"kind", ca.kind}, {"word", r_word}, {"deadline", d.deadline}, {"output_cell", d.output_cell},
           {"accept", d.accepted}};
    if (r_text) j["rows"] = rows;
    emit(j, r_text ? render_text(ca, d) : std::string(d.accepted ? "accept" : "reject") + "\n");
    code = d.accepted ? 0 : 1;
  });

  // diagram
  auto* diag_cmd = app.add_subcommand("diagram", "render the grid sites or the space-time diagram of a word");
  std::string d_src, d_word, d_svg;
  bool d_grid = false;
  diag_cmd->add_option("source", d_src)->required();
  diag_cmd->add_option("word", d_word)->required();
  diag_cmd->add_option("--svg", d_svg, "write SVG here");
  diag_cmd->add_flag("--grid", d_grid, "render the grid circuit instead of the automaton");
  diag_cmd->callback([&] {
    if (d_grid) {
      GridCircuit g = compile_grid(ensure_normal(load_source(d_src).formula));
      auto r = run_grid(g, read_word(g.formula, d_word));
      if (!d_svg.empty()) write_file(d_svg, render_grid_svg(g, r));
      json sites = json::array();
      for (int x = 1; x <= r.n; ++x)
        for (int y = 1; y <= r.n; ++y)
          if (!r.at(x, y).empty()) sites.push_back({{"x", x}, {"y", y}, {"bits", r.at(x, y)}});
      emit({{"kind", grid_kind_name(g.kind)}, {"accept", r.accepted}, {"sites", sites}}, render_grid_text(g, r));
      return;
    }
    CellularAutomaton ca = load_automaton(d_src);
    auto d = run(ca, parse_word(ca.alphabet, d_word));
    if (!d_svg.empty()) write_file(d_svg, render_svg(ca, d));
    emit({{"kind", ca.kind}, {"accept", d.accepted}, {"text", render_text(ca, d)}}, render_text(ca, d));
  });

  // from-ca
  auto* fca_cmd = app.add_subcommand("from-ca", "turn an automaton back into a formula");
  std::string f_src;
  int f_warm = 0;
  fca_cmd->add_option("automaton", f_src, "automaton JSON, formula file or corpus name")->required();
  fca_cmd->add_option("--warm", f_warm, "if the table does not close, use the transitions of words up to this length");
  fca_cmd->callback([&] {
    CellularAutomaton ca = load_automaton(f_src);
    FromCaOptions opt;
    opt.warm_length = f_warm;
    auto r = formula_from_ca_ex(ca, opt);
    std::string note = r.complete ? "" : "# exact on words up to length " + std::to_string(f_warm) + " only\n";
    emit({{"construction", r.construction}, {"complete", r.complete}, {"formula", formula_json(r.formula)}},
         note + print_formula(r.formula));
  });

  // grammar
  auto* gram_cmd = app.add_subcommand("grammar", "linear conjunctive grammars");
  gram_cmd->require_subcommand(1);
  auto* g_to = gram_cmd->add_subcommand("to-formula", "INCL formula whose accepted words are the complement");
  std::string gt_file;
  g_to->add_option("grammar", gt_file)->required();
  g_to->callback([&] {
    Formula f = grammar_to_formula(parse_grammar(read_file(gt_file)));
    emit(formula_json(f), print_formula(f));
  });
  auto* g_from = gram_cmd->add_subcommand("from-formula", "grammar of the words an INCL formula rejects");
  std::string gf_file;
  g_from->add_option("formula", gf_file)->required();
  g_from->callback([&] {
    Source s = load_source(gf_file);
    Grammar g = formula_to_grammar(ensure_normal(s.formula));
    emit({{"nonterminals", g.nonterminals.size()}, {"rules", g.rules.size()}, {"text", print_grammar(g)}},
         print_grammar(g));
  });
  auto* g_parse = gram_cmd->add_subcommand("parse", "membership of a word");
  std::string gp_file, gp_word;
  g_parse->add_option("grammar", gp_file)->required();
  g_parse->add_option("word", gp_word)->required();
  g_parse->callback([&] {
    Grammar g = parse_grammar(read_file(gp_file));
    bool in = recognize(g, parse_word(g.terminals, gp_word));
    emit({{"word", gp_word}, {"member", in}}, std::string(in ? "member" : "not a member") + "\n");
    code = in ? 0 : 1;
  });

  // corpus
  auto* corp_cmd = app.add_subcommand("corpus", "the built-in examples");
  corp_cmd->require_subcommand(1);
  auto* c_list = corp_cmd->add_subcommand("list", "list the entries");
  c_list->callback([&] {
    json j = json::array();
    std::string out;
    for (auto& e : corpus_entries()) {
      std::string kind = e.is_grammar ? "grammar" : logic_name(e.logic);
      j.push_back({{"name", e.name}, {"kind", kind}, {"description", e.description}, {"max_len", e.max_len}});
      out += e.name + std::string(20 - std::min<size_t>(19, e.name.size()), ' ') + kind + "  " + e.description + "\n";
    }
    emit(j, out);
  });
  auto* c_check = corp_cmd->add_subcommand("check", "check entries against their reference deciders");
  std::string cc_name;
  int cc_len = 0;
  c_check->add_option("name", cc_name);
  c_check->add_option("--max-len", cc_len, "override the entry's length");
  c_check->callback([&] {
    json j = json::array();
    std::string out;
    bool all = true;
    for (auto& e : corpus_entries()) {
      if (!cc_name.empty() && e.name != cc_name) continue;
      Source s = load_source(e.name);
      CrossCheckInput in{e.name, s.formula, s.grammar, s.reference};
      std::vector<std::string> stages = {"reference", "oracle", "normalized", "automaton"};
      if (s.grammar) stages.push_back("grammar-dual");
      auto r = crosscheck(in, cc_len > 0 ? cc_len : e.max_len, stages);
      all = all && r.agree();
      j.push_back(report_json(r));
      char buf[200];
      std::snprintf(buf, sizeof buf, "%-20s %s  %ld words  %.2fs", e.name.c_str(), r.agree() ? "ok  " : "FAIL", r.words,
                    r.seconds);
      out += buf;
      if (r.counterexample) out += "  counterexample " + r.counterexample_text;
      if (!r.error.empty()) out += "  " + r.error;
      out += "\n";
    }
    if (j.empty()) throw Error("no corpus entry named " + cc_name);
    emit(j, out);
    code = all ? 0 : 1;
  });

  // crosscheck
  auto* x_cmd = app.add_subcommand("crosscheck", "compare evaluation paths on all words up to a length");
  std::string x_src, x_stages;
  int x_len = 0;
  x_cmd->add_option("source", x_src, "formula, grammar or corpus name")->required();
  x_cmd->add_option("--max-len", x_len, "longest word");
  x_cmd->add_option("--stages", x_stages, "comma separated: oracle,normalized,grid,automaton (or oia, ia, trellis),grammar-dual,reference");
  x_cmd->callback([&] {
    Source s = load_source(x_src);
    std::vector<std::string> stages;
    for (size_t p = 0; !x_stages.empty() && p != std::string::npos;) {
      size_t q = x_stages.find(',', p);
      stages.push_back(x_stages.substr(p, q == std::string::npos ? q : q - p));
      p = q == std::string::npos ? q : q + 1;
    }
    CrossCheckInput in{s.name, s.formula, s.grammar, s.reference};
    auto r = crosscheck(in, x_len > 0 ? x_len : s.max_len, stages);
    std::string out = r.name + ": ";
    for (size_t i = 0; i < r.stages.size(); ++i) out += (i ? "," : "") + r.stages[i];
    char buf[100];
    std::snprintf(buf, sizeof buf, "  %ld words  %.2fs\n", r.words, r.seconds);
    out += buf;
    for (auto& sk : r.skipped) out += "skipped " + sk + "\n";
    if (r.counterexample) {
      out += "counterexample " + r.counterexample_text + ":";
      for (auto& [st, v] : r.verdicts) out += " " + st + "=" + (v ? "accept" : "reject");
      out += "\n";
    } else if (r.error.empty()) {
      out += "all stages agree\n";
    }
    if (!r.error.empty()) throw Error(r.error);
    emit(report_json(r), out);
    code = r.agree() ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    if (g_json) std::cout << json{{"error", e.what()}}.dump(2) << "\n";
    std::cerr << "hornlab: " << e.what() << "\n";
    return 2;
  }
  return code;
}
