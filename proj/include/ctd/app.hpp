#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctd/derive.hpp"
#include "ctd/ideality.hpp"
#include "ctd/model.hpp"
#include "ctd/model_file.hpp"
#include "ctd/obstruct.hpp"
#include "ctd/search.hpp"

/// Command-line front end. `run` is the whole program minus process setup,
/// so tests can drive it in-process.
namespace ctd::app {

/// Exit codes shared by every command.
enum Exit : int { kOk = 0, kViolation = 1, kUsage = 2 };

struct Globals {
  bool json = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// ---------------------------------------------------------------------------
// JSON views of domain values
// ---------------------------------------------------------------------------

inline Json to_json(const Prop& p) { return detail::labels_json(p.universe(), p.mask()); }

inline Json to_json(const Verdict& v) {
  Json j;
  j["condition"] = v.condition;
  j["holds"] = v.holds;
  if (!v.holds) {
    Json w = Json::object();
    for (const auto& [k, p] : v.witness) w[k] = to_json(p);
    j["witness"] = w;
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

inline Json to_json(const IdealFun& f) {
  Json j = Json::object();
  for (Mask x = 0; x <= f.universe().full(); ++x) j[context_key(f.universe(), x)] = detail::labels_json(f.universe(), f(x));
  return j;
}

inline Json to_json(const Trace& t) {
  Json steps = Json::array();
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& s = t.steps[k];
    Json j;
    j["step"] = k + 1;
    j["context"] = to_json(s.fact.context);
    j["obligatory"] = to_json(s.fact.obligatory);
    j["rule"] = std::string(rule_name(s.rule));
    Json prem = Json::array();
    for (auto p : s.premises) prem.push_back(p + 1);
    j["premises"] = prem;
    Json inst = Json::object();
    for (const auto& [name, p] : s.instantiation) inst[name] = to_json(p);
    j["instantiation"] = inst;
    if (!s.note.empty()) j["note"] = s.note;
    steps.push_back(j);
  }
  return steps;
}

inline Json to_json(const SearchReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["n"] = r.n;
  j["exhaustive"] = r.exhaustive;
  j["seed"] = r.seed;
  if (!r.constraints.empty()) j["constraints"] = r.constraints;
  if (!r.construction.empty()) j["construction"] = r.construction;
  j["candidates_examined"] = r.candidates_examined;
  j["candidates_admitted"] = r.candidates_admitted;
  if (r.targeted_candidates) j["targeted_candidates"] = r.targeted_candidates;
  if (r.kind == "conflict") {
    j["generic_pairs"] = r.generic_pairs;
    j["pairs_confirmed"] = r.pairs_confirmed;
  }
  j["violation_count"] = r.violation_count;
  Json vs = Json::array();
  for (const auto& v : r.violations) {
    Json e;
    e["condition"] = v.condition;
    if (v.ideal) e["F"] = to_json(*v.ideal);
    e["verdict"] = to_json(v.verdict);
    vs.push_back(e);
  }
  j["violations"] = vs;
  if (r.smallest_witness_size) j["smallest_witness_size"] = *r.smallest_witness_size;
  if (!r.notes.empty()) j["notes"] = r.notes;
  j["clean"] = r.clean();
  return j;
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

inline std::string render_ideal(const IdealFun& f) {
  std::string out;
  for (Mask x = 0; x <= f.universe().full(); ++x)
    out += "  F(" + format_set(f.universe(), x) + ") = " + format_set(f.universe(), f(x)) + "\n";
  return out;
}

inline std::string render(const SearchReport& r) {
  std::ostringstream os;
  os << "search " << r.kind << ": n=" << r.n << ", " << (r.exhaustive ? "exhaustive" : "sampled");
  if (!r.constraints.empty()) {
    os << ", constraints ";
    for (std::size_t i = 0; i < r.constraints.size(); ++i) os << (i ? "," : "") << r.constraints[i];
  }
  if (!r.construction.empty()) os << ", construction " << r.construction;
  if (!r.exhaustive) os << ", seed " << r.seed;
  os << "\n";
  if (r.kind == "conflict") {
    os << r.generic_pairs << " ordered generic pairs (" << r.generic_pairs / 2 << " unordered), " << r.pairs_confirmed
       << " confirmed, " << r.violation_count << " violations\n";
  } else if (r.kind == "counterexample") {
    os << r.candidates_examined << " candidates, " << r.candidates_admitted << " admitted, "
       << (r.violation_count ? "counterexample found" : "no counterexample") << "\n";
    if (r.smallest_witness_size) os << "smallest witnessing size: " << *r.smallest_witness_size << "\n";
  } else {
    os << r.candidates_examined << " candidates, " << r.violation_count << " violations (" << r.candidates_admitted
       << " admitted)\n";
  }
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  for (const auto& v : r.violations) {
    os << v.condition << " " << v.verdict.str() << "\n";
    if (v.ideal) os << render_ideal(*v.ideal);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

inline std::optional<Construction> parse_construction(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "sup") return Construction::sup;
  if (s == "cap") return Construction::cap;
  throw ModelError("construction must be sup or cap, got '" + s + "'");
}

inline void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

/// Splits "O(B|A)" at the last top-level '|'. Offsets in syntax errors are
/// relative to the whole expression.
inline std::pair<Formula, Formula> parse_conditional(const std::string& text) {
  std::size_t begin = 0;
  while (begin < text.size() && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  std::size_t end = text.size();
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (end - begin < 2 || text.compare(begin, 2, "O(") != 0) throw SyntaxError(begin, {"O("}, "'" + text.substr(begin, 1) + "'");
  if (text[end - 1] != ')') throw SyntaxError(end, {")"}, "end of input");
  const std::size_t lo = begin + 2, hi = end - 1;
  int depth = 0;
  std::optional<std::size_t> bar;
  for (std::size_t i = lo; i < hi; ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') --depth;
    if (text[i] == '|' && depth == 0) bar = i;
  }
  if (!bar) throw SyntaxError(hi, {"|"}, "')'");
  auto sub = [&](std::size_t from, std::size_t to) {
    try {
      return parse_formula(std::string_view(text).substr(from, to - from));
    } catch (const SyntaxError& e) {
      throw SyntaxError(from + e.offset(), e.expected(), "input");
    }
  };
  return {sub(lo, *bar), sub(*bar + 1, hi)};
}

/// Inline set literal for `derive`: "2,3" or "{2,3}", labels of `w`.
inline Prop parse_set_literal(const WorldSet& w, std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) || c == '{' || c == '}'; }),
          s.end());
  return Prop(w, parse_context_key(w, s));
}

}  // namespace detail

struct CheckArgs {
  std::string file;
  std::string conditions = "5a,5b,5c,5d,5e";
  std::string construction;
  bool include_empty = false;
  bool dump = false;
};

inline int cmd_check(const Globals& g, const CheckArgs& a, std::ostream& out) {
  const Model m = load_model_file(a.file);
  if (a.dump) {
    detail::emit(out, dump_model(m));
    return kOk;
  }
  const auto construction = detail::parse_construction(a.construction);
  if (construction && !m.has_ideal()) throw ModelError("--construction needs a model with F or scores");
  const ObFun ob = m.obligations(construction);
  const auto used = construction ? construction : m.construction;

  std::vector<Verdict> verdicts;
  for (const auto& name : detail::split_list(a.conditions)) {
    static const std::pair<const char*, Condition> ob_conditions[] = {
        {"5a", Condition::c5a}, {"5b", Condition::c5b}, {"5c", Condition::c5c}, {"5d", Condition::c5d}, {"5e", Condition::c5e}};
    bool done = false;
    for (const auto& [k, c] : ob_conditions)
      if (name == k) {
        verdicts.push_back(check(ob, c, !a.include_empty));
        done = true;
      }
    if (done) continue;
    const bool ideal_cond = name == "sub" || name == "referee" || name == "Id" || name == "I-d" || name == "Ie" || name == "I-e";
    if (!ideal_cond) throw ModelError("unknown condition '" + name + "'");
    if (!m.has_ideal()) throw ModelError("condition '" + name + "' needs a model with F or scores");
    if (name == "sub") verdicts.push_back(check_sub(*m.ideal));
    if (name == "referee") verdicts.push_back(check_referee(*m.ideal));
    if (name == "Id" || name == "I-d") verdicts.push_back(check_Id(*m.ideal));
    if (name == "Ie" || name == "I-e") verdicts.push_back(check_Ie(*m.ideal));
  }
  const bool all = std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.holds; });

  if (g.json) {
    Json j;
    j["command"] = "check";
    j["worlds"] = m.worlds.names();
    if (used) j["construction"] = std::string(construction_name(*used));
    Json vs = Json::array();
    for (const auto& v : verdicts) vs.push_back(to_json(v));
    j["verdicts"] = vs;
    j["all_hold"] = all;
    detail::emit(out, j);
  } else {
    out << "worlds " << format_set(m.worlds, m.worlds.full());
    if (used) out << ", construction " << construction_name(*used);
    out << "\n";
    for (const auto& v : verdicts) out << v.condition << ": " << v.str() << "\n";
  }
  return all ? kOk : kViolation;
}

struct QueryArgs {
  std::string file;
  std::string expression;
  std::string construction;
};

inline int cmd_query(const Globals& g, const QueryArgs& a, std::ostream& out) {
  const Model m = load_model_file(a.file);
  const auto construction = detail::parse_construction(a.construction);
  if (construction && !m.has_ideal()) throw ModelError("--construction needs a model with F or scores");
  const auto used = construction ? construction : m.construction;
  const auto [b, cond] = detail::parse_conditional(a.expression);
  const Prop ctx = extension(cond, m.valuation);
  const Prop obl = extension(b, m.valuation);
  const bool holds = holds_conditional(m.obligations(construction), ctx, obl);
  const std::string shown = "O(" + b.str() + " | " + cond.str() + ")";
  if (g.json) {
    Json j;
    j["command"] = "query";
    j["expression"] = shown;
    if (used) j["construction"] = std::string(construction_name(*used));
    j["context"] = to_json(ctx);
    j["obligation"] = to_json(obl);
    j["holds"] = holds;
    detail::emit(out, j);
  } else {
    out << shown;
    if (used) out << " under " << construction_name(*used);
    out << ": " << (holds ? "true" : "false") << "  [" << obl.str() << " in ob(" << ctx.str() << ")]\n";
  }
  return holds ? kOk : kViolation;
}

struct DeriveArgs {
  std::string file;
  std::string a = "2,3";
  std::string b = "1,3";
  unsigned n = 4;
  bool closure = false;
};

inline int cmd_derive(const Globals& g, const DeriveArgs& a, std::ostream& out) {
  std::optional<Prop> pa, pb;
  if (!a.file.empty()) {
    const Model m = load_model_file(a.file);
    pa = extension(parse_formula(a.a), m.valuation);
    pb = extension(parse_formula(a.b), m.valuation);
  } else {
    const WorldSet w = WorldSet::numbered(a.n);
    pa = detail::parse_set_literal(w, a.a);
    pb = detail::parse_set_literal(w, a.b);
  }
  const WorldSet& w = pa->universe();

  Json j;
  j["command"] = "derive";
  j["A"] = to_json(*pa);
  j["B"] = to_json(*pb);
  Trace trace;
  try {
    trace = replay_theorem1(*pa, *pb);
  } catch (const GenericityError& e) {
    if (g.json) {
      j["error"] = e.what();
      detail::emit(out, j);
    } else {
      out << "error: " << e.what() << "\n";
    }
    return kViolation;
  }
  const Verdict valid = validate(trace);
  j["trace"] = to_json(trace);
  j["valid"] = valid.holds;

  std::string closure_text;
  bool closure_ok = true;
  if (a.closure) {
    const Closure c = close({{Prop::all(w), *pa}});
    closure_ok = c.contains(trace.conclusion());
    j["closure"] = {{"facts", c.size()}, {"levels", c.depth()}, {"contains_conclusion", closure_ok}};
    closure_text = "closure of {ob(" + format_set(w, w.full()) + ") ∋ " + pa->str() + "}: " + std::to_string(c.size()) +
                   " facts in " + std::to_string(c.depth()) + " levels; conclusion " +
                   (closure_ok ? "derived" : "NOT derived") + "\n";
  }

  if (g.json) {
    detail::emit(out, j);
  } else {
    out << "A=" << pa->str() << " B=" << pb->str() << " over " << format_set(w, w.full()) << "\n";
    out << trace.render();
    out << "conclusion: " << trace.conclusion().obligatory.str() << " ∈ ob(" << trace.conclusion().context.str()
        << ")\n";
    out << closure_text;
  }
  return valid.holds && closure_ok ? kOk : kViolation;
}

struct SearchArgs {
  std::string kind;
  std::string target;
  unsigned n = 3;
  bool exhaustive = false;
  bool sampled = false;
  std::uint64_t samples = 100000;
  std::string construction = "sup";
};

inline int cmd_search(const Globals& g, const SearchArgs& a, std::ostream& out) {
  SearchOptions opt;
  if (a.exhaustive && a.sampled) throw ModelError("--exhaustive and --sampled are exclusive");
  if (a.exhaustive) opt.exhaustive = true;
  if (a.sampled) opt.exhaustive = false;
  opt.samples = a.samples;
  opt.seed = g.seed;
  opt.threads = g.threads;

  SearchReport r;
  if (a.kind == "theorem2") {
    r = verify_theorem2(a.n, opt);
  } else if (a.kind == "theorem3") {
    r = verify_theorem3(a.n, opt);
  } else if (a.kind == "5abc") {
    r = verify_5abc(a.n, *detail::parse_construction(a.construction), opt);
  } else if (a.kind == "conflict") {
    r = verify_conflict(a.n, opt);
  } else if (a.kind == "counterexample") {
    if (a.target == "5d-under-cap")
      r = find_counterexample(CounterexampleKind::d_under_cap, a.n, opt);
    else if (a.target == "5e-under-sup")
      r = find_counterexample(CounterexampleKind::e_under_sup, a.n, opt);
    else
      throw ModelError("counterexample target must be 5d-under-cap or 5e-under-sup");
  } else {
    throw ModelError("unknown search kind '" + a.kind + "'");
  }
  if (g.json) {
    Json j;
    j["command"] = "search";
    j["report"] = to_json(r);
    detail::emit(out, j);
  } else {
    out << render(r);
  }
  return r.clean() ? kOk : kViolation;
}

struct DemoArgs {
  std::string name = "pd";
  bool dump = false;
};

inline int cmd_demo(const Globals& g, const DemoArgs& a, std::ostream& out) {
  if (a.name == "theorem1") {
    DeriveArgs d;
    d.closure = true;
    return cmd_derive(g, d, out);
  }
  if (a.name != "pd") throw ModelError("unknown demo '" + a.name + "' (pd or theorem1)");

  const Model m = prisoners_dilemma();
  if (a.dump) {
    detail::emit(out, dump_model(m));
    return kOk;
  }
  const Prop other_defects = m.valuation.lookup("D_other");
  const Prop i_defect = m.valuation.lookup("D_me");
  Json j;
  j["command"] = "demo";
  j["name"] = "pd";
  j["ideal"] = to_json(*m.ideal);
  std::ostringstream text;
  text << "Prisoners' Dilemma (our years in prison: CC=1, CD=3, DC=0, DD=2; fixture values)\n";
  text << render_ideal(*m.ideal);
  for (Construction c : {Construction::sup, Construction::cap}) {
    const ObFun ob = construct(*m.ideal, c);
    const std::string cname(construction_name(c));
    Json vs = Json::array();
    text << "under " << cname << ":\n";
    for (const auto& v : check_all(ob, {std::begin(kAllConditions), std::end(kAllConditions)})) {
      vs.push_back(to_json(v));
      text << "  " << v.condition << ": " << v.str() << "\n";
    }
    const bool q = holds_conditional(ob, other_defects, i_defect);
    text << "  O(D_me | D_other): " << (q ? "true" : "false") << "\n";
    j[cname] = {{"verdicts", vs}, {"O(D_me | D_other)", q}};
  }
  if (g.json)
    detail::emit(out, j);
  else
    out << text.str();
  return kOk;
}

/// Parses `args` (without the program name) and runs one command.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-model checker for contrary-to-duty obligation semantics", "ctdcheck"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--seed", g.seed, "Seed for sampled searches")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for searches")->capture_default_str()->check(CLI::Range(1u, 256u));

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Check conditions on a model file");
  check->add_option("file", ca.file, "Model file")->required();
  check->add_option("--conditions", ca.conditions, "Comma list of 5a..5e, sub, referee, Id, Ie")->capture_default_str();
  check->add_option("--construction", ca.construction, "Override the model's construction (sup|cap)");
  check->add_flag("--include-empty-context", ca.include_empty, "Let 5a also quantify over the empty context");
  check->add_flag("--dump", ca.dump, "Print the canonical model file instead of checking");

  QueryArgs qa;
  auto* query = app.add_subcommand("query", "Evaluate a conditional obligation O(B|A)");
  query->add_option("file", qa.file, "Model file")->required();
  query->add_option("expression", qa.expression, "O(<formula>|<formula>)")->required();
  query->add_option("--construction", qa.construction, "Override the model's construction (sup|cap)");

  DeriveArgs da;
  auto* derive = app.add_subcommand("derive", "Replay the conflict derivation for A, B");
  derive->add_option("file", da.file, "Model file; --A/--B are then formulas over its valuation");
  derive->add_option("--A", da.a, "Set literal like 2,3 (or a formula with a model file)")->capture_default_str();
  derive->add_option("--B", da.b, "Set literal like 1,3 (or a formula with a model file)")->capture_default_str();
  derive->add_option("--n", da.n, "Universe size for inline sets")->capture_default_str()->check(CLI::Range(1u, kMaxWorlds));
  derive->add_flag("--closure", da.closure, "Also compute the full closure of the seed");

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "Verification sweeps and counterexample search");
  search->add_option("kind", sa.kind, "theorem2 | theorem3 | 5abc | conflict | counterexample")->required();
  search->add_option("target", sa.target, "For counterexample: 5d-under-cap | 5e-under-sup");
  search->add_option("--n", sa.n, "Universe size")->capture_default_str();
  search->add_flag("--exhaustive", sa.exhaustive, "Enumerate every candidate (n <= 3)");
  search->add_flag("--sampled", sa.sampled, "Sample candidates uniformly");
  search->add_option("--samples", sa.samples, "Sample count")->capture_default_str();
  search->add_option("--construction", sa.construction, "For 5abc: sup | cap")->capture_default_str();

  DemoArgs dm;
  auto* demo = app.add_subcommand("demo", "Bundled fixtures");
  demo->add_option("name", dm.name, "pd | theorem1")->capture_default_str();
  demo->add_flag("--dump", dm.dump, "Print the fixture's model file");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(g, ca, out);
    if (query->parsed()) return cmd_query(g, qa, out);
    if (derive->parsed()) return cmd_derive(g, da, out);
    if (search->parsed()) return cmd_search(g, sa, out);
    if (demo->parsed()) return cmd_demo(g, dm, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace ctd::app
