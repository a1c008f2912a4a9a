#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctd/error.hpp"
#include "ctd/model.hpp"
#include "ctd/obstruct.hpp"
#include "ctd/universe.hpp"
#include "ctd/verdict.hpp"

namespace ctd {

/// The assertion "obligatory ∈ ob(context)".
struct ObFact {
  Prop context;
  Prop obligatory;

  friend bool operator==(const ObFact&, const ObFact&) = default;
};

/// Inference rules read off 5(b), 5(d), 5(e):
///  R-b: from (X, Y) and Z∩X = Y∩X, infer (X, Z);
///  R-d: from (X, Y) with Y ⊆ X and Z ⊇ X, infer (Z, (Z∖X) ∪ Y);
///  R-e: from (X, Z) with Y ⊆ X and Y∩Z ≠ ∅, infer (Y, Z).
/// `identity` restates its premise after a verified set identity.
enum class Rule { seed, identity, r_b, r_d, r_e };

inline std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::seed: return "seed";
    case Rule::identity: return "set-identity";
    case Rule::r_b: return "R-b";
    case Rule::r_d: return "R-d";
    case Rule::r_e: return "R-e";
  }
  return "?";
}

struct RuleSet {
  bool b = true;
  bool d = true;
  bool e = true;
};

namespace detail {

/// Applies `rule` with the instantiation (x, y, z) to the premise fact.
/// Returns the conclusion, or nothing if the premise does not match the
/// instantiation or a side condition fails.
inline std::optional<std::pair<Mask, Mask>> apply_rule(Rule rule, Mask x, Mask y, Mask z, Mask prem_ctx,
                                                       Mask prem_set) {
  switch (rule) {
    case Rule::r_b:
      if (prem_ctx != x || prem_set != y || (z & x) != (y & x)) return std::nullopt;
      return std::pair{x, z};
    case Rule::r_d:
      if (prem_ctx != x || prem_set != y || !is_subset(y, x) || !is_subset(x, z)) return std::nullopt;
      return std::pair{z, (z & ~x) | y};
    case Rule::r_e:
      if (prem_ctx != x || prem_set != z || !is_subset(y, x) || (y & z) == 0) return std::nullopt;
      return std::pair{y, z};
    default:
      return std::nullopt;
  }
}

}  // namespace detail

/// A derivation. Step k's premises are earlier steps (0-based indices).
struct Trace {
  struct Step {
    ObFact fact;
    Rule rule = Rule::seed;
    std::vector<std::size_t> premises;
    /// Values of the rule's set variables X, Y, Z (empty for seeds).
    std::vector<std::pair<std::string, Prop>> instantiation;
    std::string note;
  };

  std::vector<Step> steps;

  bool empty() const noexcept { return steps.empty(); }
  std::size_t size() const noexcept { return steps.size(); }
  const ObFact& conclusion() const { return steps.back().fact; }

  /// One line per step:
  ///   #k: ob(<context>) ∋ <set>  [rule; from #i; X=.., Y=.., Z=..]
  std::string render() const {
    std::string out;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const Step& s = steps[k];
      out += "#" + std::to_string(k + 1) + ": ob(" + s.fact.context.str() + ") ∋ " + s.fact.obligatory.str() +
             "  [" + std::string(rule_name(s.rule));
      if (!s.premises.empty()) {
        out += "; from ";
        for (std::size_t i = 0; i < s.premises.size(); ++i)
          out += (i ? ",#" : "#") + std::to_string(s.premises[i] + 1);
      }
      if (!s.instantiation.empty()) {
        out += "; ";
        for (std::size_t i = 0; i < s.instantiation.size(); ++i)
          out += (i ? ", " : "") + s.instantiation[i].first + "=" + s.instantiation[i].second.str();
      }
      if (!s.note.empty()) out += "; " + s.note;
      out += "]\n";
    }
    return out;
  }
};

/// Checks that every step's premises precede it and that replaying its rule
/// on them reproduces its fact. The witness names the first bad step.
inline Verdict validate(const Trace& trace) {
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& s = trace.steps[k];
    auto bad = [&](std::string why) {
      return Verdict::fail("trace", {{"context", s.fact.context}, {"obligatory", s.fact.obligatory}},
                           "step #" + std::to_string(k + 1) + ": " + why);
    };
    for (auto p : s.premises)
      if (p >= k) return bad("premise does not precede the step");
    if (s.rule == Rule::seed) {
      if (!s.premises.empty()) return bad("seed with premises");
      continue;
    }
    if (s.premises.size() != 1) return bad("rule takes exactly one premise");
    const ObFact& prem = trace.steps[s.premises[0]].fact;
    if (s.rule == Rule::identity) {
      if (!(prem == s.fact)) return bad("identity step changes the fact");
      continue;
    }
    Mask xyz[3] = {0, 0, 0};
    const char* names[3] = {"X", "Y", "Z"};
    if (s.instantiation.size() != 3) return bad("missing instantiation");
    for (int i = 0; i < 3; ++i) {
      if (s.instantiation[i].first != names[i]) return bad("malformed instantiation");
      xyz[i] = s.instantiation[i].second.mask();
    }
    auto got = detail::apply_rule(s.rule, xyz[0], xyz[1], xyz[2], prem.context.mask(), prem.obligatory.mask());
    if (!got) return bad("rule does not apply to its premise");
    if (got->first != s.fact.context.mask() || got->second != s.fact.obligatory.mask())
      return bad("rule yields a different fact");
  }
  return Verdict::pass("trace");
}

inline constexpr unsigned kMaxClosureWorlds = 12;

/// Least fixpoint of a set of facts under the chosen rules, explored breadth
/// first. Every fact keeps the premise that first produced it, so traces are
/// of minimal length.
class Closure {
 public:
  const WorldSet& universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  /// Number of breadth-first levels, seeds included.
  std::size_t depth() const noexcept { return depth_; }

  bool contains(Mask context, Mask set) const { return index_.at(key(context, set)) >= 0; }
  bool contains(const ObFact& f) const { return contains(f.context.mask(), f.obligatory.mask()); }

  /// Facts in discovery order.
  std::vector<ObFact> facts() const {
    std::vector<ObFact> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back({Prop(universe_, n.context), Prop(universe_, n.set)});
    return out;
  }

  /// Minimal derivation of `f`; throws if `f` is not in the closure.
  Trace trace_to(const ObFact& f) const {
    std::int32_t at = index_.at(key(f.context.mask(), f.obligatory.mask()));
    if (at < 0) throw Error("fact " + f.obligatory.str() + " in ob(" + f.context.str() + ") is not derivable");
    std::vector<std::int32_t> chain;
    for (; at >= 0; at = nodes_[static_cast<std::size_t>(at)].parent) chain.push_back(at);
    std::reverse(chain.begin(), chain.end());
    Trace t;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const Node& n = nodes_[static_cast<std::size_t>(chain[k])];
      Trace::Step s{{Prop(universe_, n.context), Prop(universe_, n.set)}, n.rule, {}, {}, {}};
      if (n.rule != Rule::seed) {
        s.premises.push_back(k - 1);
        s.instantiation = {{"X", Prop(universe_, n.x)}, {"Y", Prop(universe_, n.y)}, {"Z", Prop(universe_, n.z)}};
      }
      t.steps.push_back(std::move(s));
    }
    return t;
  }

 private:
  friend Closure close(const std::vector<ObFact>& seeds, RuleSet rules, const WorldSet* universe);

  struct Node {
    Mask context, set;
    Rule rule;
    std::int32_t parent;
    Mask x, y, z;
  };

  explicit Closure(WorldSet w) : universe_(std::move(w)) {}

  std::size_t key(Mask context, Mask set) const { return (std::size_t{context} << universe_.size()) | set; }

  WorldSet universe_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> index_;
  std::size_t depth_ = 0;
};

/// Closes `seeds` under the selected rules. All seeds must share one
/// universe of at most 12 worlds; an empty seed set needs `universe`.
inline Closure close(const std::vector<ObFact>& seeds, RuleSet rules = {}, const WorldSet* universe = nullptr) {
  if (seeds.empty() && !universe) throw Error("closure of no seeds needs an explicit universe");
  WorldSet w = universe ? *universe : seeds.front().context.universe();
  for (const auto& s : seeds) {
    s.context.same_universe(s.obligatory);
    if (!(s.context.universe() == w)) throw UniverseMismatch();
  }
  if (w.size() > kMaxClosureWorlds)
    throw SizeGuard("closure is limited to " + std::to_string(kMaxClosureWorlds) + " worlds, got " +
                    std::to_string(w.size()));

  Closure c(w);
  const unsigned n = w.size();
  const Mask all = w.full();
  c.index_.assign(std::size_t{1} << (2 * n), -1);

  using Level = std::vector<std::int32_t>;
  auto discover = [&](Mask ctx, Mask set, Rule rule, std::int32_t parent, Mask x, Mask y, Mask z, Level& level) {
    auto& slot = c.index_[c.key(ctx, set)];
    if (slot >= 0) return;
    slot = static_cast<std::int32_t>(c.nodes_.size());
    c.nodes_.push_back({ctx, set, rule, parent, x, y, z});
    level.push_back(slot);
  };
  auto by_key = [&](std::int32_t a, std::int32_t b) {
    const auto& na = c.nodes_[static_cast<std::size_t>(a)];
    const auto& nb = c.nodes_[static_cast<std::size_t>(b)];
    return std::pair{na.context, na.set} < std::pair{nb.context, nb.set};
  };

  std::vector<std::pair<Mask, Mask>> sorted_seeds;
  for (const auto& s : seeds) sorted_seeds.emplace_back(s.context.mask(), s.obligatory.mask());
  std::sort(sorted_seeds.begin(), sorted_seeds.end());

  Level frontier;
  for (auto [ctx, set] : sorted_seeds) discover(ctx, set, Rule::seed, -1, 0, 0, 0, frontier);

  while (!frontier.empty()) {
    ++c.depth_;
    std::sort(frontier.begin(), frontier.end(), by_key);
    Level next;
    for (std::int32_t id : frontier) {
      const Mask x = c.nodes_[static_cast<std::size_t>(id)].context;
      const Mask y = c.nodes_[static_cast<std::size_t>(id)].set;
      const Mask outside = all & ~x;
      if (rules.b) {
        Mask s = 0;
        do {
          const Mask z = (y & x) | s;
          discover(x, z, Rule::r_b, id, x, y, z, next);
          s = next_subset(s, outside);
        } while (s != 0);
      }
      if (rules.d && is_subset(y, x)) {
        Mask s = 0;
        do {
          const Mask z = x | s;
          discover(z, s | y, Rule::r_d, id, x, y, z, next);
          s = next_subset(s, outside);
        } while (s != 0);
      }
      if (rules.e) {
        // Premise read as (X, Z); the new context ranges over subsets of X.
        Mask sub = 0;
        do {
          if ((sub & y) != 0) discover(sub, y, Rule::r_e, id, x, sub, y, next);
          sub = next_subset(sub, x);
        } while (sub != 0);
      }
    }
    frontier = std::move(next);
  }
  return c;
}

/// Replays the six-line conflict derivation: from A ∈ ob(W) to B ∈ ob(¬A),
/// via 5(e), 5(d), the identity ⟦A ∨ ¬(A ∨ ¬B)⟧ = ⟦A ∨ B⟧, 5(e) and 5(b).
/// Throws GenericityError unless A and B are mutually generic.
inline Trace replay_theorem1(const Prop& a, const Prop& b) {
  Verdict g = mutually_generic(a, b);
  if (!g) {
    std::string note = g.note;
    std::replace(note.begin(), note.end(), 'X', 'A');
    std::replace(note.begin(), note.end(), 'Y', 'B');
    throw GenericityError("A=" + a.str() + " and B=" + b.str() + " are not mutually generic (" + note + ")");
  }
  const WorldSet& w = a.universe();
  const Prop top = Prop::all(w);
  const Prop not_a = a.complement();
  const Prop a_or_not_b = a | b.complement();

  Trace t;
  auto push = [&](Rule rule, std::size_t premise, Prop x, Prop y, Prop z) {
    const ObFact& prem = t.steps.at(premise).fact;
    auto got = detail::apply_rule(rule, x.mask(), y.mask(), z.mask(), prem.context.mask(), prem.obligatory.mask());
    if (!got) throw Error("replay step does not apply");  // unreachable for generic A, B
    t.steps.push_back({{Prop(w, got->first), Prop(w, got->second)},
                       rule,
                       {premise},
                       {{"X", std::move(x)}, {"Y", std::move(y)}, {"Z", std::move(z)}},
                       {}});
  };

  // A ∈ ob(⊤)
  t.steps.push_back({{top, a}, Rule::seed, {}, {}, {}});
  // A ∈ ob(A ∨ ¬B)
  push(Rule::r_e, 0, top, a_or_not_b, a);
  // A ∨ ¬(A ∨ ¬B) ∈ ob(⊤)
  push(Rule::r_d, 1, a_or_not_b, a, top);

  // A ∨ B ∈ ob(⊤), after checking the identity on extensions.
  Valuation v(w);
  v.bind("A", a).bind("B", b);
  const Formula lhs = parse_formula("A | ~(A | ~B)");
  const Formula rhs = parse_formula("A | B");
  if (!(extension(lhs, v) == extension(rhs, v)) || !(extension(rhs, v) == t.steps.back().fact.obligatory))
    throw Error("set identity failed");
  t.steps.push_back({t.steps.back().fact, Rule::identity, {2}, {}, lhs.str() + " = " + rhs.str()});

  // A ∨ B ∈ ob(¬A)
  push(Rule::r_e, 3, top, not_a, a | b);
  // B ∈ ob(¬A)
  push(Rule::r_b, 4, not_a, a | b, b);
  return t;
}

/// Holds iff every fact of the trace is in the table; otherwise the witness
/// is the first missing fact.
inline Verdict check_against_table(const Trace& trace, const ObFun& ob) {
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const ObFact& f = trace.steps[k].fact;
    if (!(f.context.universe() == ob.universe())) throw UniverseMismatch();
    if (!ob.obligatory(f.context.mask(), f.obligatory.mask()))
      return Verdict::fail("table", {{"context", f.context}, {"obligatory", f.obligatory}},
                           "step #" + std::to_string(k + 1) + " missing");
  }
  return Verdict::pass("table");
}

}  // namespace ctd
