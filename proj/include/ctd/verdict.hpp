#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctd/universe.hpp"

namespace ctd {

/// Outcome of a condition check. A failing verdict carries a witness: the
/// sets that instantiate the violated condition's quantifiers, in quantifier
/// order.
struct Verdict {
  std::string condition;
  bool holds = true;
  std::vector<std::pair<std::string, Prop>> witness;
  std::string note;

  static Verdict pass(std::string condition) { return Verdict{std::move(condition), true, {}, {}}; }

  static Verdict fail(std::string condition, std::vector<std::pair<std::string, Prop>> witness,
                      std::string note = {}) {
    return Verdict{std::move(condition), false, std::move(witness), std::move(note)};
  }

  explicit operator bool() const noexcept { return holds; }

  const Prop& at(std::string_view name) const {
    for (const auto& [k, v] : witness)
      if (k == name) return v;
    throw Error("verdict has no witness component '" + std::string(name) + "'");
  }

  /// "holds" or "fails: X={..}, Y={..}".
  std::string str() const {
    if (holds) return "holds";
    std::string out = "fails";
    for (std::size_t i = 0; i < witness.size(); ++i) {
      out += i ? ", " : ": ";
      out += witness[i].first + "=" + witness[i].second.str();
    }
    if (!note.empty()) out += " (" + note + ")";
    return out;
  }
};

}  // namespace ctd
