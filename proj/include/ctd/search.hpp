#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ctd/derive.hpp"
#include "ctd/ideality.hpp"
#include "ctd/model.hpp"
#include "ctd/obstruct.hpp"

namespace ctd {

/// Axioms an enumerated F must satisfy besides (sub), which every candidate
/// satisfies by construction.
struct Constraints {
  bool referee = false;
  bool Id = false;
  bool Ie = false;

  bool admits(const IdealFun& f) const {
    return (!referee || check_referee(f)) && (!Id || check_Id(f)) && (!Ie || check_Ie(f));
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out{"sub"};
    if (referee) out.emplace_back("referee");
    if (Id) out.emplace_back("I-d");
    if (Ie) out.emplace_back("I-e");
    return out;
  }
};

inline constexpr unsigned kMaxEnumerationWorlds = 4;
inline constexpr unsigned kMaxExhaustiveWorlds = 3;
inline constexpr unsigned kMaxConflictWorlds = 6;

/// log2 of the number of F with F(X) ⊆ X for all X: Σ_X |X| = n·2^(n−1).
inline unsigned sub_space_log2(unsigned n) { return n == 0 ? 0 : n << (n - 1); }

/// Size of the (sub)-respecting space; n ≤ 4 (2^32 at n = 4).
inline std::uint64_t sub_space_size(unsigned n) {
  if (n > kMaxEnumerationWorlds) throw SizeGuard("candidate space exceeds 2^64 beyond 4 worlds");
  return std::uint64_t{1} << sub_space_log2(n);
}

namespace detail {
/// Scatters the low bits of `value` onto the set bits of `mask`, in order.
inline Mask deposit(std::uint64_t value, Mask mask) {
  Mask out = 0;
  for (Mask bit = mask; bit; bit &= bit - 1) {
    if (value & 1u) out |= bit & (~bit + 1);
    value >>= 1;
  }
  return out;
}
}  // namespace detail

/// Walks the (sub)-respecting ideality functions of a universe in canonical
/// order: lexicographic in the tuple (F(∅), F(1), ..., F(W)) with contexts
/// and values compared as bitmasks. Extra constraints filter the stream.
class FEnumerator {
 public:
  FEnumerator(WorldSet universe, Constraints constraints = {})
      : universe_(std::move(universe)), constraints_(constraints), total_(sub_space_size(universe_.size())) {}

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t examined() const noexcept { return cursor_; }

  /// The candidate at `index` in canonical order, ignoring constraints.
  IdealFun decode(std::uint64_t index) const {
    std::vector<Mask> table(universe_.context_count(), 0);
    for (Mask x = universe_.full();; --x) {
      const unsigned width = popcount(x);
      table[x] = detail::deposit(index & ((std::uint64_t{1} << width) - 1), x);
      index >>= width;
      if (x == 0) break;
    }
    return IdealFun(universe_, std::move(table));
  }

  /// Next admitted candidate, or nothing when exhausted.
  std::optional<IdealFun> next() {
    while (cursor_ < total_) {
      IdealFun f = decode(cursor_++);
      if (constraints_.admits(f)) return f;
    }
    return std::nullopt;
  }

 private:
  WorldSet universe_;
  Constraints constraints_;
  std::uint64_t total_;
  std::uint64_t cursor_ = 0;
};

/// Draws F uniformly from the (sub)-respecting space: every context's value
/// is an independent uniform subset. Sample i depends only on (seed, i).
inline IdealFun sample_ideal(const WorldSet& w, std::uint64_t seed, std::uint64_t i) {
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * (i + 1)));
  std::vector<Mask> table(w.context_count(), 0);
  for (Mask x = 0; x <= w.full(); ++x) table[x] = static_cast<Mask>(rng()) & x;
  return IdealFun(w, std::move(table));
}

/// F = argmin of a score vector, for every vector in {0..n-1}^n: all strict
/// and weak rankings (with repetitions).
inline std::vector<IdealFun> score_induced(const WorldSet& w) {
  const unsigned n = w.size();
  std::vector<IdealFun> out;
  std::vector<double> scores(n, 0.0);
  std::uint64_t count = 1;
  for (unsigned i = 0; i < n; ++i) count *= n;
  for (std::uint64_t code = 0; code < count; ++code) {
    std::uint64_t c = code;
    for (unsigned i = 0; i < n; ++i, c /= n) scores[i] = static_cast<double>(c % n);
    out.push_back(IdealFun::argmin(w, scores));
  }
  return out;
}

/// Argmin F for each strict ranking, in lexicographic order of the
/// best-to-worst world sequence.
inline std::vector<IdealFun> ranking_induced(const WorldSet& w) {
  std::vector<unsigned> order(w.size());
  std::iota(order.begin(), order.end(), 0u);
  std::vector<IdealFun> out;
  do out.push_back(IdealFun::from_ranking(w, order));
  while (std::next_permutation(order.begin(), order.end()));
  return out;
}

struct Violation {
  std::string condition;
  std::optional<IdealFun> ideal;
  Verdict verdict;
  /// Position in the scan that produced it; orders violations canonically.
  std::uint64_t index = 0;
};

struct SearchReport {
  std::string kind;
  unsigned n = 0;
  std::vector<std::string> constraints;
  std::string construction;
  bool exhaustive = false;
  std::uint64_t seed = 0;
  std::uint64_t candidates_examined = 0;
  std::uint64_t candidates_admitted = 0;
  std::uint64_t targeted_candidates = 0;
  std::uint64_t violation_count = 0;
  /// The first few violations in canonical order.
  std::vector<Violation> violations;
  /// Counterexample searches: the least universe size with a hit, if any.
  std::optional<unsigned> smallest_witness_size;
  /// Conflict checks.
  std::uint64_t generic_pairs = 0;
  std::uint64_t pairs_confirmed = 0;
  std::vector<std::string> notes;

  /// Verification sweeps are clean without violations; counterexample
  /// searches succeed when one was found.
  bool clean() const { return kind == "counterexample" ? violation_count > 0 : violation_count == 0; }
};

struct SearchOptions {
  /// Unset: exhaustive iff n ≤ 3.
  std::optional<bool> exhaustive;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t max_reported = 8;
};

namespace detail {

/// Runs `test` over [0, count) split across threads. Each call returns a
/// failing verdict or nothing; results merge in index order, so the outcome
/// does not depend on the thread count.
struct SweepTotals {
  std::uint64_t admitted = 0;
  std::uint64_t violations = 0;
  std::vector<Violation> first;
};

inline SweepTotals sweep(std::uint64_t count, unsigned threads, std::size_t keep,
                         const std::function<std::optional<Violation>(std::uint64_t, bool&)>& test) {
  threads = std::max(1u, threads);
  if (count < threads) threads = static_cast<unsigned>(std::max<std::uint64_t>(1, count));
  std::vector<SweepTotals> parts(threads);
  auto work = [&](unsigned t) {
    const std::uint64_t lo = count * t / threads, hi = count * (t + 1) / threads;
    auto& part = parts[t];
    for (std::uint64_t i = lo; i < hi; ++i) {
      bool admitted = false;
      auto v = test(i, admitted);
      if (admitted) ++part.admitted;
      if (!v) continue;
      ++part.violations;
      if (part.first.size() < keep) part.first.push_back(std::move(*v));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  SweepTotals total;
  for (auto& p : parts) {
    total.admitted += p.admitted;
    total.violations += p.violations;
    for (auto& v : p.first)
      if (total.first.size() < keep) total.first.push_back(std::move(v));
  }
  return total;
}

inline bool resolve_exhaustive(unsigned n, const SearchOptions& opt) {
  if (n == 0) throw SizeGuard("universe size must be at least 1");
  if (n > kMaxEnumerationWorlds)
    throw SizeGuard("ideality search supports at most " + std::to_string(kMaxEnumerationWorlds) + " worlds, got " +
                    std::to_string(n));
  const bool exhaustive = opt.exhaustive.value_or(n <= kMaxExhaustiveWorlds);
  if (exhaustive && n > kMaxExhaustiveWorlds)
    throw SizeGuard("exhaustive enumeration is limited to " + std::to_string(kMaxExhaustiveWorlds) +
                    " worlds (2^" + std::to_string(sub_space_log2(n)) + " candidates at n=" + std::to_string(n) + ")");
  return exhaustive;
}

/// `test` returns the failing verdict of `condition` for an admitted F.
using FTest = std::function<std::optional<Verdict>(const IdealFun&)>;

/// Shared driver for the verification suites: exhaustive sweep or seeded
/// sampling, and in sampling mode also every score-induced F.
inline void run_f_sweep(SearchReport& rep, unsigned n, const Constraints& cons, const SearchOptions& opt,
                        const std::string& condition, const FTest& test) {
  rep.n = n;
  rep.exhaustive = resolve_exhaustive(n, opt);
  const WorldSet w = WorldSet::numbered(n);
  rep.constraints = cons.names();
  rep.seed = opt.seed;
  FEnumerator en(w, cons);
  const std::uint64_t count = rep.exhaustive ? en.total() : opt.samples;

  auto body = [&](const IdealFun& f, std::uint64_t index, bool& admitted) -> std::optional<Violation> {
    if (!cons.admits(f)) return std::nullopt;
    admitted = true;
    auto bad = test(f);
    if (!bad) return std::nullopt;
    return Violation{condition, f, std::move(*bad), index};
  };

  auto totals = sweep(count, opt.threads, opt.max_reported, [&](std::uint64_t i, bool& admitted) {
    return body(rep.exhaustive ? en.decode(i) : sample_ideal(w, opt.seed, i), i, admitted);
  });
  rep.candidates_examined = count;
  rep.candidates_admitted = totals.admitted;
  rep.violation_count = totals.violations;
  rep.violations = std::move(totals.first);

  if (!rep.exhaustive) {
    const auto targeted = score_induced(w);
    rep.targeted_candidates = targeted.size();
    for (std::size_t k = 0; k < targeted.size(); ++k) {
      bool admitted = false;
      auto v = body(targeted[k], count + k, admitted);
      if (admitted) ++rep.candidates_admitted;
      if (!v) continue;
      ++rep.violation_count;
      if (rep.violations.size() < opt.max_reported) rep.violations.push_back(std::move(*v));
    }
    rep.notes.push_back("sampled " + std::to_string(count) + " of 2^" + std::to_string(sub_space_log2(w.size())) +
                        " candidates, plus " + std::to_string(targeted.size()) + " score-induced F");
  }
}

}  // namespace detail

/// (sub) + (I-d) ⟹ ob_sup(F) satisfies 5(d).
inline SearchReport verify_theorem2(unsigned n, const SearchOptions& opt = {}) {
  SearchReport rep;
  rep.kind = "theorem2";
  rep.construction = "sup";
  detail::run_f_sweep(rep, n, Constraints{false, true, false}, opt, "5d",
                      [](const IdealFun& f) -> std::optional<Verdict> {
                        auto v = check_5d(ob_sup(f));
                        return v ? std::nullopt : std::optional<Verdict>(std::move(v));
                      });
  return rep;
}

/// (sub) + (I-e) ⟹ ob_cap(F) satisfies 5(e).
inline SearchReport verify_theorem3(unsigned n, const SearchOptions& opt = {}) {
  SearchReport rep;
  rep.kind = "theorem3";
  rep.construction = "cap";
  detail::run_f_sweep(rep, n, Constraints{false, false, true}, opt, "5e",
                      [](const IdealFun& f) -> std::optional<Verdict> {
                        auto v = check_5e(ob_cap(f));
                        return v ? std::nullopt : std::optional<Verdict>(std::move(v));
                      });
  return rep;
}

/// (sub) + (referee) ⟹ the constructed ob satisfies 5(a) on nonempty
/// contexts, 5(b) and 5(c).
inline SearchReport verify_5abc(unsigned n, Construction construction, const SearchOptions& opt = {}) {
  SearchReport rep;
  rep.kind = "5abc";
  rep.construction = std::string(construction_name(construction));
  detail::run_f_sweep(rep, n, Constraints{true, false, false}, opt, "5abc",
                      [construction](const IdealFun& f) -> std::optional<Verdict> {
                        const ObFun ob = construct(f, construction);
                        for (Condition c : {Condition::c5a, Condition::c5b, Condition::c5c}) {
                          auto v = check(ob, c, true);
                          if (!v) return v;
                        }
                        return std::nullopt;
                      });
  return rep;
}

enum class CounterexampleKind { d_under_cap, e_under_sup };

inline std::string_view counterexample_name(CounterexampleKind k) {
  return k == CounterexampleKind::d_under_cap ? "5d-under-cap" : "5e-under-sup";
}

namespace detail {
inline std::optional<Verdict> counterexample_test(CounterexampleKind k, const IdealFun& f) {
  Verdict v = k == CounterexampleKind::d_under_cap ? check_5d(ob_cap(f)) : check_5e(ob_sup(f));
  if (v) return std::nullopt;
  return v;
}

/// Exhaustive scan at size m for any admitted F that violates.
inline bool has_counterexample(CounterexampleKind k, unsigned m) {
  const Constraints cons{true, true, true};
  FEnumerator en(WorldSet::numbered(m), cons);
  while (auto f = en.next())
    if (counterexample_test(k, *f)) return true;
  return false;
}
}  // namespace detail

/// Searches for an F satisfying (sub), (referee), (I-d) and (I-e) whose
/// construction violates the named condition. Ranking-induced F are tried
/// first, then the full space (exhaustive up to 3 worlds, sampled at 4).
inline SearchReport find_counterexample(CounterexampleKind kind, unsigned n, const SearchOptions& opt = {}) {
  SearchReport rep;
  rep.kind = "counterexample";
  rep.n = n;
  rep.construction = kind == CounterexampleKind::d_under_cap ? "cap" : "sup";
  rep.exhaustive = detail::resolve_exhaustive(n, opt);
  const Constraints cons{true, true, true};
  rep.constraints = cons.names();
  rep.seed = opt.seed;
  const std::string cond = kind == CounterexampleKind::d_under_cap ? "5d" : "5e";
  const WorldSet w = WorldSet::numbered(n);

  std::uint64_t index = 0;
  auto consider = [&](const IdealFun& f) {
    ++rep.candidates_examined;
    const std::uint64_t at = index++;
    if (!cons.admits(f)) return false;
    ++rep.candidates_admitted;
    if (auto v = detail::counterexample_test(kind, f)) {
      ++rep.violation_count;
      rep.violations.push_back({cond, f, std::move(*v), at});
      return true;
    }
    return false;
  };

  bool found = false;
  const auto rankings = ranking_induced(w);
  rep.targeted_candidates = rankings.size();
  for (const auto& f : rankings)
    if ((found = consider(f))) break;
  if (!found) {
    FEnumerator en(w);
    const std::uint64_t count = rep.exhaustive ? en.total() : opt.samples;
    for (std::uint64_t i = 0; i < count && !found; ++i)
      found = consider(rep.exhaustive ? en.decode(i) : sample_ideal(w, opt.seed, i));
  }

  for (unsigned m = 1; m <= std::min(n, kMaxExhaustiveWorlds); ++m)
    if (detail::has_counterexample(kind, m)) {
      rep.smallest_witness_size = m;
      break;
    }
  if (!rep.smallest_witness_size && found) rep.smallest_witness_size = n;
  if (!found) rep.notes.push_back("no counterexample");
  return rep;
}

/// For every mutually generic (A, B) over n worlds, checks that the closure
/// of {A ∈ ob(W)} under R-b, R-d, R-e contains B ∈ ob(W∖A).
inline SearchReport verify_conflict(unsigned n, const SearchOptions& opt = {}) {
  if (n == 0 || n > kMaxConflictWorlds)
    throw SizeGuard("conflict check supports 1.." + std::to_string(kMaxConflictWorlds) + " worlds, got " +
                    std::to_string(n));
  SearchReport rep;
  rep.kind = "conflict";
  rep.n = n;
  rep.exhaustive = true;
  rep.seed = opt.seed;
  const WorldSet w = WorldSet::numbered(n);
  const Mask all = w.full();

  std::mutex m;
  std::uint64_t pairs = 0, confirmed = 0;
  auto totals = detail::sweep(std::uint64_t{all} + 1, opt.threads, opt.max_reported,
                              [&](std::uint64_t ai, bool& admitted) -> std::optional<Violation> {
                                const Prop a(w, static_cast<Mask>(ai));
                                std::optional<Closure> c;
                                std::uint64_t local_pairs = 0, local_ok = 0;
                                std::optional<Violation> bad;
                                for (Mask b = 0; b <= all; ++b) {
                                  const Prop bp(w, b);
                                  if (!mutually_generic(a, bp)) continue;
                                  if (!c) c = close({{Prop::all(w), a}});
                                  ++local_pairs;
                                  if (c->contains(a.complement().mask(), b)) {
                                    ++local_ok;
                                  } else if (!bad) {
                                    bad = Violation{"conflict", std::nullopt,
                                                    Verdict::fail("conflict", {{"A", a}, {"B", bp}}), ai};
                                  }
                                }
                                admitted = local_pairs > 0;
                                std::lock_guard lock(m);
                                pairs += local_pairs;
                                confirmed += local_ok;
                                return bad;
                              });
  rep.candidates_examined = std::uint64_t{all} + 1;
  rep.candidates_admitted = totals.admitted;
  rep.generic_pairs = pairs;
  rep.pairs_confirmed = confirmed;
  rep.violation_count = pairs - confirmed;
  rep.violations = std::move(totals.first);
  if (pairs == 0) rep.notes.push_back("no mutually generic pairs at this size");
  return rep;
}

}  // namespace ctd
