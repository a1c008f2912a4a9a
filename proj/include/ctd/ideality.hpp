#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ctd/obstruct.hpp"
#include "ctd/universe.hpp"
#include "ctd/verdict.hpp"

namespace ctd {

/// Ideality function F : P(W) → P(W), total over the 2^n contexts. None of
/// the axioms is enforced at construction; use the check_* predicates.
class IdealFun {
 public:
  /// F(X) = ∅ for every X.
  explicit IdealFun(WorldSet universe)
      : universe_(std::move(universe)), table_(universe_.context_count(), 0) {}

  IdealFun(WorldSet universe, std::vector<Mask> table) : universe_(std::move(universe)), table_(std::move(table)) {
    if (table_.size() != universe_.context_count())
      throw Error("ideality table must list all " + std::to_string(universe_.context_count()) + " contexts");
    for (Mask v : table_)
      if (!is_subset(v, universe_.full())) throw Error("ideality table mentions worlds outside the universe");
  }

  /// F(X) = X.
  static IdealFun identity(const WorldSet& w) {
    std::vector<Mask> t(w.context_count());
    std::iota(t.begin(), t.end(), Mask{0});
    return IdealFun(w, std::move(t));
  }

  /// F(X) = the worlds of X with the least score; ties are all kept.
  static IdealFun argmin(const WorldSet& w, const std::vector<double>& scores) {
    if (scores.size() != w.size()) throw Error("need one score per world");
    std::vector<Mask> t(w.context_count(), 0);
    for (Mask x = 1; x <= w.full(); ++x) {
      double best = std::numeric_limits<double>::infinity();
      for (unsigned i = 0; i < w.size(); ++i)
        if (x >> i & 1u) best = std::min(best, scores[i]);
      for (unsigned i = 0; i < w.size(); ++i)
        if ((x >> i & 1u) && scores[i] == best) t[x] |= Mask{1} << i;
    }
    return IdealFun(w, std::move(t));
  }

  /// Argmin of a strict ranking; `order` lists worlds from best to worst.
  static IdealFun from_ranking(const WorldSet& w, const std::vector<unsigned>& order) {
    if (order.size() != w.size()) throw Error("ranking must list every world once");
    std::vector<double> scores(w.size(), -1.0);
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (order[r] >= w.size() || scores[order[r]] >= 0) throw Error("ranking must list every world once");
      scores[order[r]] = static_cast<double>(r);
    }
    return argmin(w, scores);
  }

  const WorldSet& universe() const noexcept { return universe_; }
  unsigned size() const noexcept { return universe_.size(); }
  const std::vector<Mask>& table() const noexcept { return table_; }

  Mask operator()(Mask context) const { return table_.at(context); }
  void set(Mask context, Mask ideal) {
    if (!is_subset(ideal, universe_.full())) throw Error("ideal set outside the universe");
    table_.at(context) = ideal;
  }

  friend bool operator==(const IdealFun&, const IdealFun&) = default;

 private:
  WorldSet universe_;
  std::vector<Mask> table_;
};

// ---------------------------------------------------------------------------
// Axioms on F
// ---------------------------------------------------------------------------

/// F(X) ⊆ X for every X.
inline Verdict check_sub(const IdealFun& f) {
  for (Mask x = 0; x <= f.universe().full(); ++x)
    if (!is_subset(f(x), x)) return Verdict::fail("sub", detail::named(f.universe(), {{"X", x}}));
  return Verdict::pass("sub");
}

/// X ≠ ∅ implies F(X) ≠ ∅.
inline Verdict check_referee(const IdealFun& f) {
  for (Mask x = 1; x <= f.universe().full(); ++x)
    if (f(x) == 0) return Verdict::fail("referee", detail::named(f.universe(), {{"X", x}}));
  return Verdict::pass("referee");
}

/// F(X∩Y) ⊇ F(X)∩Y for all X, Y.
inline Verdict check_Id(const IdealFun& f) {
  const Mask all = f.universe().full();
  for (Mask x = 0; x <= all; ++x)
    for (Mask y = 0; y <= all; ++y)
      if (!is_subset(f(x) & y, f(x & y)))
        return Verdict::fail("I-d", detail::named(f.universe(), {{"X", x}, {"Y", y}}));
  return Verdict::pass("I-d");
}

/// F(X∩Y) = F(X)∩Y whenever F(X)∩Y ≠ ∅.
inline Verdict check_Ie(const IdealFun& f) {
  const Mask all = f.universe().full();
  for (Mask x = 0; x <= all; ++x)
    for (Mask y = 0; y <= all; ++y)
      if ((f(x) & y) != 0 && f(x & y) != (f(x) & y))
        return Verdict::fail("I-e", detail::named(f.universe(), {{"X", x}, {"Y", y}}));
  return Verdict::pass("I-e");
}

// ---------------------------------------------------------------------------
// Obligation functions generated by F
// ---------------------------------------------------------------------------

/// ob(X) = { Y : Y ⊇ F(X) }.
inline ObFun ob_sup(const IdealFun& f) {
  ObFun ob(f.universe());
  const Mask all = f.universe().full();
  for (Mask x = 0; x <= all; ++x) {
    const Mask free = all & ~f(x);
    Mask s = 0;
    do {
      ob.add(x, f(x) | s);
      s = next_subset(s, free);
    } while (s != 0);
  }
  return ob;
}

/// ob(X) = { Y : Y∩X = F(X) }. Empty wherever F(X) ⊄ X.
inline ObFun ob_cap(const IdealFun& f) {
  ObFun ob(f.universe());
  const Mask all = f.universe().full();
  for (Mask x = 0; x <= all; ++x) {
    if (!is_subset(f(x), x)) continue;
    const Mask free = all & ~x;
    Mask s = 0;
    do {
      ob.add(x, f(x) | s);
      s = next_subset(s, free);
    } while (s != 0);
  }
  return ob;
}

enum class Construction { sup, cap };

inline std::string_view construction_name(Construction c) { return c == Construction::sup ? "sup" : "cap"; }

inline ObFun construct(const IdealFun& f, Construction c) { return c == Construction::sup ? ob_sup(f) : ob_cap(f); }

/// O(B | A): ⟦B⟧ ∈ ob(⟦A⟧). No actual world is involved.
inline bool holds_conditional(const ObFun& ob, const Prop& a, const Prop& b) {
  a.same_universe(b);
  if (!(a.universe() == ob.universe())) throw UniverseMismatch();
  return ob.obligatory(a.mask(), b.mask());
}

// ---------------------------------------------------------------------------
// Induced preference
// ---------------------------------------------------------------------------

/// Binary relation on worlds; `holds(a, b)` reads "a ≤ b", a is no more
/// desirable than b.
class PrefRelation {
 public:
  explicit PrefRelation(WorldSet universe) : universe_(std::move(universe)), up_(universe_.size(), 0) {}

  const WorldSet& universe() const noexcept { return universe_; }

  bool holds(unsigned a, unsigned b) const { return up_.at(a) >> b & 1u; }
  void add(unsigned a, unsigned b) { up_.at(a) |= Mask{1} << b; }

  /// The set {b : a ≤ b}.
  Mask above(unsigned a) const { return up_.at(a); }

  std::vector<std::pair<unsigned, unsigned>> pairs() const {
    std::vector<std::pair<unsigned, unsigned>> out;
    for (unsigned a = 0; a < up_.size(); ++a)
      for (unsigned b = 0; b < up_.size(); ++b)
        if (holds(a, b)) out.emplace_back(a, b);
    return out;
  }

  bool reflexive() const {
    for (unsigned a = 0; a < up_.size(); ++a)
      if (!holds(a, a)) return false;
    return true;
  }

  bool transitive() const {
    for (unsigned a = 0; a < up_.size(); ++a)
      for (unsigned b = 0; b < up_.size(); ++b)
        if (holds(a, b) && !is_subset(up_[b], up_[a])) return false;
    return true;
  }

  bool is_equality() const {
    for (unsigned a = 0; a < up_.size(); ++a)
      if (up_[a] != (Mask{1} << a)) return false;
    return true;
  }

  bool is_total() const {
    for (Mask row : up_)
      if (row != universe_.full()) return false;
    return true;
  }

  friend bool operator==(const PrefRelation&, const PrefRelation&) = default;

 private:
  WorldSet universe_;
  std::vector<Mask> up_;
};

namespace detail {
// a ≤ b iff for every context X in `contexts`, a ∈ F(X) → b ∈ F(X).
template <typename Contexts>
PrefRelation preference_over(const IdealFun& f, Contexts&& contexts) {
  const unsigned n = f.size();
  PrefRelation rel(f.universe());
  std::vector<Mask> up(n, f.universe().full());
  contexts([&](Mask x) {
    const Mask ideal = f(x);
    for (unsigned a = 0; a < n; ++a)
      if (ideal >> a & 1u) up[a] &= ideal;
  });
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = 0; b < n; ++b)
      if (up[a] >> b & 1u) rel.add(a, b);
  return rel;
}
}  // namespace detail

/// a ≤ b iff (∀X)(a ∈ F(X) → b ∈ F(X)). Always a preorder.
inline PrefRelation preference_global(const IdealFun& f) {
  return detail::preference_over(f, [&](auto&& visit) {
    for (Mask x = 0; x <= f.universe().full(); ++x) visit(x);
  });
}

/// How the context-localised order is read.
///  - corrected: (∀X ⊆ Y)(a ∈ F(X) → b ∈ F(X)).
///  - literal:   (∀X ⊆ Y)(a ∈ F(Y) → b ∈ F(Y)), as the formula is commonly
///    printed. The bound X is unused there, so this collapses to a single
///    test on F(Y).
enum class LocalReading { corrected, literal };

inline PrefRelation preference_local(const IdealFun& f, const Prop& context,
                                     LocalReading reading = LocalReading::corrected) {
  if (!(context.universe() == f.universe())) throw UniverseMismatch();
  const Mask y = context.mask();
  if (reading == LocalReading::literal)
    return detail::preference_over(f, [&](auto&& visit) {
      Mask x = 0;
      do {
        visit(y);
        x = next_subset(x, y);
      } while (x != 0);
    });
  return detail::preference_over(f, [&](auto&& visit) {
    Mask x = 0;
    do {
      visit(x);
      x = next_subset(x, y);
    } while (x != 0);
  });
}

}  // namespace ctd
