#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ctd/error.hpp"

namespace ctd {

/// A subset of the worlds {0..n-1}; bit i set iff world i is a member.
using Mask = std::uint32_t;

inline constexpr unsigned kMaxWorlds = 16;

inline constexpr Mask full_mask(unsigned n) noexcept {
  return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1;
}

inline constexpr bool is_subset(Mask a, Mask b) noexcept { return (a & ~b) == 0; }

inline constexpr unsigned popcount(Mask m) noexcept {
  return static_cast<unsigned>(std::popcount(m));
}

/// Successor of `sub` among the subsets of `super` in increasing numeric
/// order. Wraps to 0 after `super` itself.
inline constexpr Mask next_subset(Mask sub, Mask super) noexcept {
  return ((sub | ~super) + 1) & super;
}

/// Finite universe of labelled worlds. Cheap to copy; copies share the label
/// table, and two universes compare equal iff their labels agree.
class WorldSet {
 public:
  explicit WorldSet(std::vector<std::string> names)
      : names_(std::make_shared<const std::vector<std::string>>(validate(std::move(names)))) {}

  /// Universe whose worlds are labelled "0", "1", ..., "n-1".
  static WorldSet numbered(unsigned n) {
    std::vector<std::string> names;
    for (unsigned i = 0; i < n; ++i) names.push_back(std::to_string(i));
    return WorldSet(std::move(names));
  }

  unsigned size() const noexcept { return static_cast<unsigned>(names_->size()); }
  Mask full() const noexcept { return full_mask(size()); }
  std::size_t context_count() const noexcept { return std::size_t{1} << size(); }

  const std::string& name(unsigned i) const { return names_->at(i); }
  const std::vector<std::string>& names() const noexcept { return *names_; }

  std::optional<unsigned> index_of(std::string_view label) const {
    auto it = std::find(names_->begin(), names_->end(), label);
    if (it == names_->end()) return std::nullopt;
    return static_cast<unsigned>(it - names_->begin());
  }

  friend bool operator==(const WorldSet& a, const WorldSet& b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

 private:
  static std::vector<std::string> validate(std::vector<std::string> names) {
    if (names.empty()) throw Error("a universe needs at least one world");
    if (names.size() > kMaxWorlds)
      throw SizeGuard("at most " + std::to_string(kMaxWorlds) + " worlds are supported, got " +
                      std::to_string(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i].empty()) throw Error("world labels must be nonempty");
      for (std::size_t j = 0; j < i; ++j)
        if (names[i] == names[j]) throw Error("duplicate world label '" + names[i] + "'");
    }
    return names;
  }

  std::shared_ptr<const std::vector<std::string>> names_;
};

/// Renders a set of worlds as "{a,b,c}" using the universe's labels.
inline std::string format_set(const WorldSet& w, Mask m) {
  std::string out = "{";
  bool first = true;
  for (unsigned i = 0; i < w.size(); ++i) {
    if (!(m >> i & 1u)) continue;
    if (!first) out += ',';
    out += w.name(i);
    first = false;
  }
  return out + "}";
}

/// A proposition: a set of worlds of a particular universe. Equality is
/// extensional.
class Prop {
 public:
  Prop(WorldSet universe, Mask members) : universe_(std::move(universe)), members_(members) {
    if (!is_subset(members_, universe_.full()))
      throw Error("proposition mentions worlds outside its universe");
  }

  static Prop empty(const WorldSet& w) { return Prop(w, 0); }
  static Prop all(const WorldSet& w) { return Prop(w, w.full()); }

  /// Builds a proposition from world labels; throws ModelError on unknown labels.
  static Prop of(const WorldSet& w, const std::vector<std::string>& labels) {
    Mask m = 0;
    for (const auto& l : labels) {
      auto i = w.index_of(l);
      if (!i) throw ModelError("undeclared world label '" + l + "'");
      m |= Mask{1} << *i;
    }
    return Prop(w, m);
  }

  const WorldSet& universe() const noexcept { return universe_; }
  Mask mask() const noexcept { return members_; }
  unsigned size() const noexcept { return popcount(members_); }
  bool is_empty() const noexcept { return members_ == 0; }
  bool contains(unsigned world) const noexcept { return world < 32 && (members_ >> world & 1u); }

  bool subset_of(const Prop& o) const {
    same_universe(o);
    return is_subset(members_, o.members_);
  }

  Prop complement() const { return Prop(universe_, universe_.full() & ~members_); }

  friend Prop operator&(const Prop& a, const Prop& b) {
    a.same_universe(b);
    return Prop(a.universe_, a.members_ & b.members_);
  }
  friend Prop operator|(const Prop& a, const Prop& b) {
    a.same_universe(b);
    return Prop(a.universe_, a.members_ | b.members_);
  }
  friend Prop operator-(const Prop& a, const Prop& b) {
    a.same_universe(b);
    return Prop(a.universe_, a.members_ & ~b.members_);
  }

  friend bool operator==(const Prop& a, const Prop& b) {
    return a.members_ == b.members_ && a.universe_ == b.universe_;
  }

  std::string str() const { return format_set(universe_, members_); }
  friend std::ostream& operator<<(std::ostream& os, const Prop& p) { return os << p.str(); }

  void same_universe(const Prop& o) const {
    if (!(universe_ == o.universe_)) throw UniverseMismatch();
  }

 private:
  WorldSet universe_;
  Mask members_;
};

}  // namespace ctd
