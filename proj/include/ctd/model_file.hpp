#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "ctd/ideality.hpp"
#include "ctd/model.hpp"
#include "ctd/obstruct.hpp"

namespace ctd {

using Json = nlohmann::ordered_json;

/// Context keys are the member labels joined by commas, in the order the
/// worlds are declared; the empty context is "".
inline std::string context_key(const WorldSet& w, Mask m) {
  std::string out;
  for (unsigned i = 0; i < w.size(); ++i) {
    if (!(m >> i & 1u)) continue;
    if (!out.empty()) out += ',';
    out += w.name(i);
  }
  return out;
}

/// Accepts the labels in any order; rejects unknown or repeated labels.
inline Mask parse_context_key(const WorldSet& w, std::string_view key) {
  Mask m = 0;
  if (key.empty()) return m;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = key.find(',', start);
    std::string label(key.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    auto i = w.index_of(label);
    if (!i) throw ModelError("context key \"" + std::string(key) + "\": undeclared world label '" + label + "'");
    if (m >> *i & 1u) throw ModelError("context key \"" + std::string(key) + "\": label '" + label + "' repeated");
    m |= Mask{1} << *i;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return m;
}

/// Everything a model file describes: the worlds, an optional valuation,
/// and one source of obligations (an F table, a score table, or an explicit
/// ob table).
struct Model {
  enum class Source { ideal, scores, ob };

  WorldSet worlds;
  Valuation valuation;
  Source source = Source::ideal;
  std::optional<IdealFun> ideal;
  std::vector<double> scores;
  std::optional<ObFun> table;
  std::optional<Construction> construction;

  explicit Model(WorldSet w) : worlds(w), valuation(w) {}

  bool has_ideal() const noexcept { return ideal.has_value(); }

  /// The obligation table: explicit, or built from F with the model's
  /// construction (or `override_with`).
  ObFun obligations(std::optional<Construction> override_with = std::nullopt) const {
    if (table) return *table;
    auto c = override_with ? override_with : construction;
    if (!c) throw ModelError("model has no construction");
    return construct(*ideal, *c);
  }

  friend bool operator==(const Model&, const Model&) = default;
};

namespace detail {

inline std::vector<std::string> labels_at(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ModelError(where + ": expected a list of world labels");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ModelError(where + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

inline Mask mask_at(const WorldSet& w, const Json& j, const std::string& where) {
  Mask m = 0;
  for (const auto& l : labels_at(j, where)) {
    auto i = w.index_of(l);
    if (!i) throw ModelError(where + ": undeclared world label '" + l + "'");
    m |= Mask{1} << *i;
  }
  return m;
}

inline Json labels_json(const WorldSet& w, Mask m) {
  Json arr = Json::array();
  for (unsigned i = 0; i < w.size(); ++i)
    if (m >> i & 1u) arr.push_back(w.name(i));
  return arr;
}

/// Reads a context-keyed map, requiring every nonempty context; `read`
/// stores one entry.
template <typename Read>
void read_context_map(const WorldSet& w, const Json& j, const std::string& field, Read&& read) {
  if (!j.is_object()) throw ModelError(field + ": expected an object keyed by context");
  std::vector<bool> seen(w.context_count(), false);
  for (const auto& [key, value] : j.items()) {
    const std::string where = field + "[\"" + key + "\"]";
    Mask ctx;
    try {
      ctx = parse_context_key(w, key);
    } catch (const ModelError& e) {
      throw ModelError(field + ": " + e.what());
    }
    if (seen[ctx]) throw ModelError(where + ": context listed twice");
    seen[ctx] = true;
    read(ctx, value, where);
  }
  for (Mask x = 1; x <= w.full(); ++x)
    if (!seen[x]) throw ModelError(field + ": missing context \"" + context_key(w, x) + "\"");
}

}  // namespace detail

inline Model load_model(const Json& j) {
  if (!j.is_object()) throw ModelError("model file: expected a JSON object");
  static const std::set<std::string> known{"worlds", "valuation", "F", "scores", "ob", "options"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ModelError("model file: unknown field \"" + k + "\"");
  if (!j.contains("worlds")) throw ModelError("model file: missing \"worlds\"");

  Model m(WorldSet(detail::labels_at(j["worlds"], "worlds")));
  const WorldSet& w = m.worlds;

  if (j.contains("valuation")) {
    const Json& v = j["valuation"];
    if (!v.is_object()) throw ModelError("valuation: expected an object");
    for (const auto& [atom, labels] : v.items()) {
      const std::string where = "valuation[\"" + atom + "\"]";
      const Formula parsed = [&] {
        try {
          return parse_formula(atom);
        } catch (const SyntaxError&) {
          throw ModelError(where + ": not an atom name");
        }
      }();
      if (parsed.kind() != Formula::Kind::Atom) throw ModelError(where + ": not an atom name");
      m.valuation.bind(atom, Prop(w, detail::mask_at(w, labels, where)));
    }
  }

  const int sources = int(j.contains("F")) + int(j.contains("scores")) + int(j.contains("ob"));
  if (sources != 1) throw ModelError("model file: exactly one of \"F\", \"scores\", \"ob\" is required");

  if (j.contains("F")) {
    m.source = Model::Source::ideal;
    IdealFun f(w);
    detail::read_context_map(w, j["F"], "F", [&](Mask ctx, const Json& v, const std::string& where) {
      f.set(ctx, detail::mask_at(w, v, where));
    });
    m.ideal = std::move(f);
  } else if (j.contains("scores")) {
    m.source = Model::Source::scores;
    const Json& s = j["scores"];
    if (!s.is_object()) throw ModelError("scores: expected an object keyed by world label");
    std::vector<std::optional<double>> got(w.size());
    for (const auto& [label, value] : s.items()) {
      auto i = w.index_of(label);
      if (!i) throw ModelError("scores: undeclared world label '" + label + "'");
      if (!value.is_number()) throw ModelError("scores[\"" + label + "\"]: expected a number");
      got[*i] = value.get<double>();
    }
    for (unsigned i = 0; i < w.size(); ++i) {
      if (!got[i]) throw ModelError("scores: missing world '" + w.name(i) + "'");
      m.scores.push_back(*got[i]);
    }
    m.ideal = IdealFun::argmin(w, m.scores);
  } else {
    m.source = Model::Source::ob;
    ObFun ob(w);
    detail::read_context_map(w, j["ob"], "ob", [&](Mask ctx, const Json& v, const std::string& where) {
      if (!v.is_array()) throw ModelError(where + ": expected a list of propositions");
      for (std::size_t i = 0; i < v.size(); ++i)
        ob.add(ctx, detail::mask_at(w, v[i], where + "[" + std::to_string(i) + "]"));
    });
    m.table = std::move(ob);
  }

  if (j.contains("options")) {
    const Json& o = j["options"];
    if (!o.is_object()) throw ModelError("options: expected an object");
    for (const auto& [k, v] : o.items()) {
      if (k != "construction") throw ModelError("options: unknown field \"" + k + "\"");
      if (v == "sup")
        m.construction = Construction::sup;
      else if (v == "cap")
        m.construction = Construction::cap;
      else
        throw ModelError("options[\"construction\"]: expected \"sup\" or \"cap\"");
    }
  }
  if (m.has_ideal() && !m.construction)
    throw ModelError("options: \"construction\" is required with \"F\" or \"scores\"");
  if (!m.has_ideal() && m.construction)
    throw ModelError("options: \"construction\" only applies to \"F\" or \"scores\"");
  return m;
}

inline Model load_model_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ModelError(std::string("model file: invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  return load_model(j);
}

inline Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return load_model_text(buf.str());
  } catch (const ModelError& e) {
    throw ModelError(path + ": " + e.what());
  }
}

/// Canonical model file; load_model(dump_model(m)) == m.
inline Json dump_model(const Model& m) {
  const WorldSet& w = m.worlds;
  Json j;
  j["worlds"] = w.names();
  if (!m.valuation.atoms().empty()) {
    Json v = Json::object();
    for (const auto& [atom, p] : m.valuation.atoms()) v[atom] = detail::labels_json(w, p.mask());
    j["valuation"] = v;
  }
  switch (m.source) {
    case Model::Source::ideal: {
      Json f = Json::object();
      for (Mask x = 0; x <= w.full(); ++x) f[context_key(w, x)] = detail::labels_json(w, (*m.ideal)(x));
      j["F"] = f;
      break;
    }
    case Model::Source::scores: {
      Json s = Json::object();
      for (unsigned i = 0; i < w.size(); ++i) s[w.name(i)] = m.scores[i];
      j["scores"] = s;
      break;
    }
    case Model::Source::ob: {
      Json o = Json::object();
      for (Mask x = 0; x <= w.full(); ++x) {
        Json fam = Json::array();
        for (Mask y : m.table->family(x).members()) fam.push_back(detail::labels_json(w, y));
        o[context_key(w, x)] = fam;
      }
      j["ob"] = o;
      break;
    }
  }
  if (m.construction) j["options"] = {{"construction", std::string(construction_name(*m.construction))}};
  return j;
}

/// Prisoners' Dilemma: world XY has our choice X and the other prisoner's
/// choice Y (C = stay silent, D = defect). Scores are our years in prison;
/// the numbers are fixture data chosen as the textbook payoffs.
inline Model prisoners_dilemma(Construction c = Construction::sup) {
  const WorldSet w({"CC", "CD", "DC", "DD"});
  Model m(w);
  m.valuation.bind("C_me", Prop::of(w, {"CC", "CD"}))
      .bind("D_me", Prop::of(w, {"DC", "DD"}))
      .bind("C_other", Prop::of(w, {"CC", "DC"}))
      .bind("D_other", Prop::of(w, {"CD", "DD"}))
      .bind("same", Prop::of(w, {"CC", "DD"}));
  m.source = Model::Source::scores;
  m.scores = {1, 3, 0, 2};
  m.ideal = IdealFun::argmin(w, m.scores);
  m.construction = c;
  return m;
}

}  // namespace ctd
