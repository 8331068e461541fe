#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diamond/bits.hpp"
#include "diamond/error.hpp"
#include "diamond/funcspec.hpp"
#include "diamond/pseudo_tree.hpp"

namespace diamond {

struct NamedWindow {
  std::string name;
  SetWindow window;

  friend bool operator==(const NamedWindow&, const NamedWindow&) = default;
};

/// A finite family of windows standing for the generators of a filter.
/// Empty generators are kept so that they surface as FIP failures.
class FilterBase {
 public:
  explicit FilterBase(std::uint64_t horizon) : horizon_(horizon) {}
  FilterBase(std::uint64_t horizon, std::vector<NamedWindow> generators);

  std::uint64_t horizon() const noexcept { return horizon_; }
  std::span<const NamedWindow> generators() const noexcept { return generators_; }
  std::size_t size() const noexcept { return generators_.size(); }

  void add(std::string name, SetWindow window);
  /// Indices of empty generators.
  std::vector<std::size_t> empty_generators() const;

  friend bool operator==(const FilterBase&, const FilterBase&) = default;

 private:
  std::uint64_t horizon_;
  std::vector<NamedWindow> generators_;
};

inline constexpr std::size_t kDefaultFipArity = 5;

/// B_r = {n : r restricted to f(n) is in L_n}, one generator per branch named "B<i>".
FilterBase base_from_tree(const PseudoTree& tree, std::span<const BranchSample> branches);

struct FipEntry {
  std::vector<std::size_t> members;
  /// Largest element of the intersection; absent on failure.
  std::optional<std::uint64_t> witness;
};

struct FipReport {
  std::size_t arity = 0;
  std::vector<FipEntry> entries;

  bool passed() const noexcept;
  std::optional<FipEntry> first_failure() const;
};

/// Intersects every subfamily of 1..arity generators. The witness is the
/// largest common element, the nearest finite stand-in for "infinitely many".
FipReport check_fip(const FilterBase& base, std::size_t arity = kDefaultFipArity);

/// Tested relation between the skies of pi and f.
enum class SkyRelation {
  /// sky(pi) < sky(f): for every g, {n : g(pi(n)) < f(n)} is large.
  kLess,
  /// sky(pi) >= sky(f): some g has g(pi(n)) >= f(n) on a large set.
  kGreaterEq,
};

enum class SkyOutcome { kSupported, kRefutedAtHorizon, kInconclusive };

const char* to_string(SkyRelation r) noexcept;
const char* to_string(SkyOutcome o) noexcept;

struct SkyProbe {
  std::string test;
  /// Generator indices whose intersection X was probed; empty means the full window.
  std::vector<std::size_t> members;
  /// {n in X : g(pi(n)) < f(n)}.
  SetWindow window;
  /// X has an element at or past the midpoint.
  bool live = false;
  /// Some n in X past the midpoint has g(pi(n)) < f(n).
  bool below_past_midpoint = false;
  /// Some n in X past the midpoint has g(pi(n)) >= f(n).
  bool above_past_midpoint = false;
};

struct SkyVerdict {
  SkyRelation relation = SkyRelation::kLess;
  SkyOutcome outcome = SkyOutcome::kInconclusive;
  std::uint64_t midpoint = 0;
  std::vector<SkyProbe> probes;
  /// Refutation of kLess: the part of X past the midpoint, where g(pi(n)) >= f(n) throughout.
  std::optional<SetWindow> counterexample;
  std::optional<std::size_t> deciding_probe;
  /// Support for kGreaterEq: the test g that is large on every live probe.
  std::optional<std::string> witness_test;
};

struct SkyOptions {
  SkyRelation relation = SkyRelation::kLess;
  /// Defaults to horizon / 2.
  std::optional<std::uint64_t> midpoint;
  /// Probes every intersection of up to this many generators.
  std::size_t probe_arity = 2;
};

/// {n < horizon : g(pi(n)) < f(n)}. An overflowing g(pi(n)) counts as large.
SetWindow sky_window(const FuncSpec& pi, const FuncSpec& f, const FuncSpec& g, std::uint64_t horizon);

/// Three-valued finite probe of a sky relation over a supplied test family.
///
/// kLess is supported when, for every test g, every live probe has some n
/// past the midpoint with g(pi(n)) < f(n), and refuted when some live probe
/// has none. kGreaterEq is supported when one test g has g(pi(n)) >= f(n)
/// past the midpoint on every live probe; otherwise it stays inconclusive,
/// since an untested g may exist. Without live probes nothing is decided.
SkyVerdict sky_probe(const FuncSpec& pi, const FuncSpec& f, const FilterBase& base,
                     std::span<const FuncSpec> tests, const SkyOptions& options = {});

/// Raised when adjoining a window breaks the finite intersection property.
class FipError : public Error {
 public:
  FipError(const std::string& what, std::vector<std::size_t> failing)
      : Error(what), failing_(std::move(failing)) {}
  const std::vector<std::size_t>& failing_subfamily() const noexcept { return failing_; }

 private:
  std::vector<std::size_t> failing_;
};

struct Extension {
  FilterBase base;
  FipReport report;
};

/// Adjoins {n : g(pi(n)) < f(n)} (named "sky:<g>") and re-certifies FIP at
/// min(arity, |base| + 1). Throws FipError with the failing subfamily.
Extension extend_good(const FilterBase& base, const FuncSpec& pi, const FuncSpec& f, const FuncSpec& g,
                      std::size_t arity = kDefaultFipArity);

/// Ground element (F, G) with F a subset of [0, cap) and G a family of subsets of F.
/// Bit j of `family` stands for the j-th subset of F, counting subsets of F
/// as binary numbers over F's own members in increasing order.
struct IsbellPoint {
  std::uint32_t support = 0;
  std::uint32_t family = 0;

  friend bool operator==(const IsbellPoint&, const IsbellPoint&) = default;
};

class IsbellFamily {
 public:
  IsbellFamily(std::uint64_t ground_cap, std::size_t max_support);

  std::uint64_t ground_cap() const noexcept { return ground_cap_; }
  std::size_t max_support() const noexcept { return max_support_; }
  std::uint64_t ground_size() const noexcept { return offsets_.back(); }
  /// The ground element at a position, blocks ordered by support mask.
  IsbellPoint point(std::uint64_t position) const;
  std::uint64_t position(IsbellPoint p) const;

  /// A_X = {(F, G) : F ∩ X ∈ G}, one per index, over ground positions.
  std::span<const SetWindow> sets() const noexcept { return sets_; }

  /// Adds A_X for X given as a mask over [0, cap).
  void add_index(std::uint32_t x);

 private:
  std::uint64_t ground_cap_;
  std::size_t max_support_;
  std::vector<std::uint32_t> supports_;
  std::vector<std::uint64_t> offsets_;
  std::vector<SetWindow> sets_;
};

inline constexpr std::uint64_t kMaxIsbellCap = 12;
inline constexpr std::size_t kMaxIsbellArity = 4;

/// Codes the index sets as an independent family. Supports are limited to
/// floor(arity^2 / 4) points: a combination of k members and k' complements
/// needs at most k * k' points to tell its indices apart. Indices must be
/// distinct subsets of [0, ground_cap).
IsbellFamily isbell_family(std::uint64_t ground_cap, std::span<const SetWindow> indices, std::size_t arity);

struct IndependenceReport {
  std::size_t arity = 0;
  std::uint64_t combinations = 0;
  /// (members, complemented members) of the first empty combination.
  std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> failure;

  bool passed() const noexcept { return !failure.has_value(); }
};

/// Exhaustively intersects every k members with k' complements of other
/// members, 1 <= k + k' <= arity.
IndependenceReport check_independence(const IsbellFamily& family, std::size_t arity);

}  // namespace diamond
