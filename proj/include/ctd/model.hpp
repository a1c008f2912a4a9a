#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctd/error.hpp"
#include "ctd/universe.hpp"
#include "ctd/verdict.hpp"

namespace ctd {

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// Immutable propositional formula over named atoms. Subtrees are shared.
class Formula {
 public:
  enum class Kind { Top, Bottom, Atom, Not, And, Or };

  static Formula top() { return Formula(Kind::Top); }
  static Formula bottom() { return Formula(Kind::Bottom); }
  static Formula atom(std::string name) {
    Formula f(Kind::Atom);
    f.name_ = std::move(name);
    return f;
  }
  static Formula negation(Formula f) {
    Formula r(Kind::Not);
    r.lhs_ = std::make_shared<const Formula>(std::move(f));
    return r;
  }
  static Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const Formula& operand() const { return *lhs_; }
  const Formula& left() const { return *lhs_; }
  const Formula& right() const { return *rhs_; }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::Top:
      case Kind::Bottom:
        return true;
      case Kind::Atom:
        return a.name_ == b.name_;
      case Kind::Not:
        return *a.lhs_ == *b.lhs_;
      case Kind::And:
      case Kind::Or:
        return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
    }
    return false;
  }

  /// Canonical ASCII rendering; parse(print(f)) == f.
  std::string str() const {
    std::string out;
    print(out, 0);
    return out;
  }

 private:
  explicit Formula(Kind k) : kind_(k) {}

  static Formula binary(Kind k, Formula a, Formula b) {
    Formula r(k);
    r.lhs_ = std::make_shared<const Formula>(std::move(a));
    r.rhs_ = std::make_shared<const Formula>(std::move(b));
    return r;
  }

  // Binding strength: | = 1, & = 2, ~ and atoms = 3.
  int level() const noexcept {
    switch (kind_) {
      case Kind::Or: return 1;
      case Kind::And: return 2;
      default: return 3;
    }
  }

  void print(std::string& out, int context) const {
    bool parens = level() < context;
    if (parens) out += '(';
    switch (kind_) {
      case Kind::Top: out += 'T'; break;
      case Kind::Bottom: out += 'F'; break;
      case Kind::Atom: out += name_; break;
      case Kind::Not:
        out += '~';
        lhs_->print(out, 3);
        break;
      case Kind::And:
      case Kind::Or:
        // Left-associative: the right operand needs parentheses at equal level.
        lhs_->print(out, level());
        out += kind_ == Kind::And ? " & " : " | ";
        rhs_->print(out, level() + 1);
        break;
    }
    if (parens) out += ')';
  }

  Kind kind_;
  std::string name_;
  std::shared_ptr<const Formula> lhs_, rhs_;
};

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse() {
    Formula f = disjunction();
    skip_ws();
    if (pos_ != text_.size()) fail({"&", "|", "end of input"});
    return f;
  }

 private:
  static constexpr const char* kOperand[] = {"T", "F", "identifier", "~", "("};

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    skip_ws();
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'" : "end of input";
    throw SyntaxError(pos_, std::move(expected), found);
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept('|')) f = Formula::disj(std::move(f), conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (accept('&')) f = Formula::conj(std::move(f), unary());
    return f;
  }

  Formula unary() {
    if (accept('~')) return Formula::negation(unary());
    return primary();
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  Formula primary() {
    skip_ws();
    if (accept('(')) {
      Formula f = disjunction();
      if (!accept(')')) fail({"&", "|", ")"});
      return f;
    }
    if (pos_ < text_.size() && ident_start(text_[pos_])) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
      std::string word(text_.substr(start, pos_ - start));
      if (word == "T") return Formula::top();
      if (word == "F") return Formula::bottom();
      return Formula::atom(std::move(word));
    }
    fail({std::begin(kOperand), std::end(kOperand)});
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `T`, `F`, identifiers, `~`, `&`, `|` and parentheses with
/// precedence ~ > & > | and left associativity. Throws SyntaxError.
inline Formula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// ---------------------------------------------------------------------------
// Valuations and extensions
// ---------------------------------------------------------------------------

/// Assignment of a proposition to each atom name; all over one universe.
class Valuation {
 public:
  explicit Valuation(WorldSet universe) : universe_(std::move(universe)) {}

  Valuation& bind(const std::string& atom, const Prop& p) {
    if (!(p.universe() == universe_)) throw UniverseMismatch();
    atoms_.insert_or_assign(atom, p);
    return *this;
  }

  const WorldSet& universe() const noexcept { return universe_; }
  const std::map<std::string, Prop>& atoms() const noexcept { return atoms_; }

  const Prop& lookup(const std::string& atom) const {
    auto it = atoms_.find(atom);
    if (it == atoms_.end()) throw UnboundAtom(atom);
    return it->second;
  }

  friend bool operator==(const Valuation& a, const Valuation& b) {
    return a.universe_ == b.universe_ && a.atoms_ == b.atoms_;
  }

 private:
  WorldSet universe_;
  std::map<std::string, Prop> atoms_;
};

namespace detail {
inline Mask extension_mask(const Formula& f, const Valuation& v) {
  const Mask all = v.universe().full();
  switch (f.kind()) {
    case Formula::Kind::Top: return all;
    case Formula::Kind::Bottom: return 0;
    case Formula::Kind::Atom: return v.lookup(f.name()).mask();
    case Formula::Kind::Not: return all & ~extension_mask(f.operand(), v);
    case Formula::Kind::And: return extension_mask(f.left(), v) & extension_mask(f.right(), v);
    case Formula::Kind::Or: return extension_mask(f.left(), v) | extension_mask(f.right(), v);
  }
  return 0;
}
}  // namespace detail

/// The set of worlds where `f` is true under `v`. Throws UnboundAtom.
inline Prop extension(const Formula& f, const Valuation& v) {
  return Prop(v.universe(), detail::extension_mask(f, v));
}

// ---------------------------------------------------------------------------
// General position
// ---------------------------------------------------------------------------

/// X and Y are mutually generic when X∩Y, X∖Y, Y∖X and W∖(X∪Y) are all
/// nonempty. A failing verdict lists the empty regions.
inline Verdict mutually_generic(const Prop& x, const Prop& y) {
  x.same_universe(y);
  const WorldSet& w = x.universe();
  const std::pair<const char*, Mask> regions[] = {
      {"X∩Y", x.mask() & y.mask()},
      {"X∖Y", x.mask() & ~y.mask()},
      {"Y∖X", y.mask() & ~x.mask()},
      {"W∖(X∪Y)", w.full() & ~(x.mask() | y.mask())},
  };
  std::string note;
  for (const auto& [label, m] : regions) {
    if (m != 0) continue;
    note += note.empty() ? "" : ", ";
    note += label;
  }
  if (note.empty()) return Verdict::pass("mutually-generic");
  std::vector<std::pair<std::string, Prop>> witness{{"X", x}, {"Y", y}};
  return Verdict::fail("mutually-generic", std::move(witness), "empty region: " + note);
}

}  // namespace ctd
