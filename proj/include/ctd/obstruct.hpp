#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ctd/universe.hpp"
#include "ctd/verdict.hpp"

namespace ctd {

/// A family of propositions over an n-world universe, stored as a 2^n-bit
/// membership set indexed by subset mask.
class Family {
 public:
  Family() = default;
  explicit Family(unsigned n) : bits_(words_for(n), 0) {}

  static Family everything(unsigned n) {
    Family f(n);
    for (Mask m = 0; m <= full_mask(n); ++m) f.insert(m);
    return f;
  }

  bool contains(Mask m) const noexcept { return bits_[m >> 6] >> (m & 63) & 1u; }
  void insert(Mask m) noexcept { bits_[m >> 6] |= std::uint64_t{1} << (m & 63); }
  void erase(Mask m) noexcept { bits_[m >> 6] &= ~(std::uint64_t{1} << (m & 63)); }

  std::size_t size() const noexcept {
    std::size_t c = 0;
    for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool empty() const noexcept { return size() == 0; }

  /// Members in increasing mask order.
  std::vector<Mask> members() const {
    std::vector<Mask> out;
    for (std::size_t w = 0; w < bits_.size(); ++w)
      for (auto word = bits_[w]; word; word &= word - 1)
        out.push_back(static_cast<Mask>(w * 64 + static_cast<unsigned>(std::countr_zero(word))));
    return out;
  }

  friend bool operator==(const Family&, const Family&) = default;

 private:
  static std::size_t words_for(unsigned n) { return ((std::size_t{1} << n) + 63) / 64; }
  std::vector<std::uint64_t> bits_;
};

/// Obligation function: for every context X ⊆ W, the family ob(X) of
/// propositions obligatory in X. Always total over the 2^n contexts.
class ObFun {
 public:
  /// Every context starts with an empty family.
  explicit ObFun(WorldSet universe)
      : universe_(std::move(universe)), table_(universe_.context_count(), Family(universe_.size())) {}

  const WorldSet& universe() const noexcept { return universe_; }
  unsigned size() const noexcept { return universe_.size(); }

  const Family& family(Mask context) const { return table_.at(context); }
  Family& family(Mask context) { return table_.at(context); }

  bool obligatory(Mask context, Mask prop) const { return table_.at(context).contains(prop); }
  void add(Mask context, Mask prop) { table_.at(context).insert(prop); }

  friend bool operator==(const ObFun&, const ObFun&) = default;

 private:
  WorldSet universe_;
  std::vector<Family> table_;
};

// All checks sweep the quantified sets in increasing bitmask order, so the
// reported witness is the lexicographically least violating tuple.

namespace detail {
inline std::vector<std::pair<std::string, Prop>> named(const WorldSet& w,
                                                      std::initializer_list<std::pair<const char*, Mask>> sets) {
  std::vector<std::pair<std::string, Prop>> out;
  for (const auto& [k, m] : sets) out.emplace_back(k, Prop(w, m));
  return out;
}
}  // namespace detail

/// ∅ ∉ ob(X) for every X (every nonempty X when `nonempty_only`).
inline Verdict check_5a(const ObFun& ob, bool nonempty_only = true) {
  const Mask all = ob.universe().full();
  for (Mask x = nonempty_only ? 1 : 0; x <= all; ++x)
    if (ob.obligatory(x, 0)) return Verdict::fail("5a", detail::named(ob.universe(), {{"X", x}}));
  return Verdict::pass("5a");
}

/// Y∩X = Z∩X implies (Y ∈ ob(X) ⟺ Z ∈ ob(X)).
inline Verdict check_5b(const ObFun& ob) {
  const Mask all = ob.universe().full();
  for (Mask x = 0; x <= all; ++x) {
    const Family& fam = ob.family(x);
    const Mask outside = all & ~x;
    for (Mask y = 0; y <= all; ++y) {
      const bool in_y = fam.contains(y);
      // Z ranges over (Y∩X) ∪ S for S ⊆ W∖X; the two parts are disjoint, so
      // increasing S gives increasing Z.
      Mask s = 0;
      do {
        const Mask z = (y & x) | s;
        if (fam.contains(z) != in_y)
          return Verdict::fail("5b", detail::named(ob.universe(), {{"X", x}, {"Y", y}, {"Z", z}}));
        s = next_subset(s, outside);
      } while (s != 0);
    }
  }
  return Verdict::pass("5b");
}

/// Y, Z ∈ ob(X) implies Y∩Z ∈ ob(X).
inline Verdict check_5c(const ObFun& ob) {
  const Mask all = ob.universe().full();
  for (Mask x = 0; x <= all; ++x) {
    const Family& fam = ob.family(x);
    const auto members = fam.members();
    for (Mask y : members)
      for (Mask z : members)
        if (!fam.contains(y & z))
          return Verdict::fail("5c", detail::named(ob.universe(), {{"X", x}, {"Y", y}, {"Z", z}}));
  }
  return Verdict::pass("5c");
}

/// Y ⊆ X ⊆ Z and Y ∈ ob(X) imply (Z∖X) ∪ Y ∈ ob(Z).
inline Verdict check_5d(const ObFun& ob) {
  const Mask all = ob.universe().full();
  for (Mask x = 0; x <= all; ++x) {
    const Family& fam = ob.family(x);
    Mask y = 0;
    do {
      if (fam.contains(y)) {
        Mask s = 0;
        const Mask outside = all & ~x;
        do {
          const Mask z = x | s;
          if (!ob.obligatory(z, (z & ~x) | y))
            return Verdict::fail("5d", detail::named(ob.universe(), {{"X", x}, {"Y", y}, {"Z", z}}));
          s = next_subset(s, outside);
        } while (s != 0);
      }
      y = next_subset(y, x);
    } while (y != 0);
  }
  return Verdict::pass("5d");
}

/// Y ⊆ X, Z ∈ ob(X) and Y∩Z ≠ ∅ imply Z ∈ ob(Y).
inline Verdict check_5e(const ObFun& ob) {
  const Mask all = ob.universe().full();
  for (Mask x = 0; x <= all; ++x) {
    const auto members = ob.family(x).members();
    if (members.empty()) continue;
    Mask y = 0;
    do {
      for (Mask z : members)
        if ((y & z) != 0 && !ob.obligatory(y, z))
          return Verdict::fail("5e", detail::named(ob.universe(), {{"X", x}, {"Y", y}, {"Z", z}}));
      y = next_subset(y, x);
    } while (y != 0);
  }
  return Verdict::pass("5e");
}

/// Slot for conditions supplied by the caller, e.g. a variant of 5(c). The
/// predicate sees one context and its family; the witness is the least
/// context for which it returns false.
struct CustomCondition {
  std::string name;
  std::function<bool(Mask context, const Family& family, unsigned n)> predicate;
};

inline Verdict check_custom(const ObFun& ob, const CustomCondition& cond) {
  for (Mask x = 0; x <= ob.universe().full(); ++x)
    if (!cond.predicate(x, ob.family(x), ob.size()))
      return Verdict::fail(cond.name, detail::named(ob.universe(), {{"X", x}}));
  return Verdict::pass(cond.name);
}

enum class Condition { c5a, c5b, c5c, c5d, c5e };

inline constexpr Condition kAllConditions[] = {Condition::c5a, Condition::c5b, Condition::c5c,
                                               Condition::c5d, Condition::c5e};

inline std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::c5a: return "5a";
    case Condition::c5b: return "5b";
    case Condition::c5c: return "5c";
    case Condition::c5d: return "5d";
    case Condition::c5e: return "5e";
  }
  return "?";
}

inline Verdict check(const ObFun& ob, Condition c, bool nonempty_only = true) {
  switch (c) {
    case Condition::c5a: return check_5a(ob, nonempty_only);
    case Condition::c5b: return check_5b(ob);
    case Condition::c5c: return check_5c(ob);
    case Condition::c5d: return check_5d(ob);
    case Condition::c5e: return check_5e(ob);
  }
  return Verdict::pass("?");
}

/// Runs the selected conditions in the fixed order 5a..5e, then any custom
/// conditions in the order given.
inline std::vector<Verdict> check_all(const ObFun& ob, const std::vector<Condition>& selection,
                                      bool nonempty_only = true,
                                      const std::vector<CustomCondition>& custom = {}) {
  std::vector<Verdict> out;
  for (Condition c : kAllConditions)
    if (std::find(selection.begin(), selection.end(), c) != selection.end())
      out.push_back(check(ob, c, nonempty_only));
  for (const auto& cc : custom) out.push_back(check_custom(ob, cc));
  return out;
}

/// Re-evaluates one instance of a condition at the given sets; true iff that
/// instance is violated. `y`/`z` are ignored for 5a.
inline bool violates(const ObFun& ob, Condition c, Mask x, Mask y = 0, Mask z = 0) {
  switch (c) {
    case Condition::c5a:
      return ob.obligatory(x, 0);
    case Condition::c5b:
      return (y & x) == (z & x) && ob.obligatory(x, y) != ob.obligatory(x, z);
    case Condition::c5c:
      return ob.obligatory(x, y) && ob.obligatory(x, z) && !ob.obligatory(x, y & z);
    case Condition::c5d:
      return is_subset(y, x) && is_subset(x, z) && ob.obligatory(x, y) &&
             !ob.obligatory(z, (z & ~x) | y);
    case Condition::c5e:
      return is_subset(y, x) && ob.obligatory(x, z) && (y & z) != 0 && !ob.obligatory(y, z);
  }
  return false;
}

/// Witness re-validation for a failing verdict produced by `check`.
inline bool violates(const ObFun& ob, Condition c, const Verdict& v) {
  if (v.holds) return false;
  if (c == Condition::c5a) return violates(ob, c, v.at("X").mask());
  return violates(ob, c, v.at("X").mask(), v.at("Y").mask(), v.at("Z").mask());
}

}  // namespace ctd
