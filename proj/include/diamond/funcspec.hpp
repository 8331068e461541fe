#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace diamond {

/// A total index function omega -> omega written in a small expression
/// language:
///
///     expr := name | name "(" expr {"," expr} ")" | integer
///
/// Catalog:
///   id, ruler (2-adic valuation of n+1), floorlog2 (floor(log2(n+1))) and
///   pow2 (2^n) are unary; written bare they apply to n, written with an
///   argument they apply to the argument's value.
///   const(c) is the constant c; a bare integer is also a constant.
///   add, mul and min fold over one or more arguments.
///   compose(a, b, ..., z) is a(b(...z(n))).
///
/// All arithmetic is unsigned 64-bit; leaving that range raises OverflowError.
class FuncSpec {
 public:
  struct Node;

  /// The identity function.
  FuncSpec();

  static FuncSpec parse(std::string_view text);
  static FuncSpec constant(std::uint64_t c);
  /// outer o inner.
  static FuncSpec compose(const FuncSpec& outer, const FuncSpec& inner);
  static FuncSpec pointwise_min(const FuncSpec& a, const FuncSpec& b);

  std::uint64_t operator()(std::uint64_t n) const;
  /// nullopt when the value leaves the 64-bit range.
  std::optional<std::uint64_t> try_eval(std::uint64_t n) const noexcept;

  /// Canonical text; parsing it yields an identical tree.
  const std::string& str() const noexcept { return text_; }

  friend bool operator==(const FuncSpec& a, const FuncSpec& b) noexcept;

 private:
  explicit FuncSpec(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
  std::string text_;
};

FuncSpec parse_funcspec(std::string_view text);
std::uint64_t eval_func(const FuncSpec& spec, std::uint64_t n);

/// The members below the horizon sharing one function value.
struct FiberReport {
  std::uint64_t value = 0;
  std::vector<std::uint64_t> members;
  std::uint64_t truncated_at = 0;

  friend bool operator==(const FiberReport&, const FiberReport&) = default;
};

/// Preimages of every value attained on [0, horizon), sorted by value.
std::vector<FiberReport> fiber_census(const FuncSpec& spec, std::uint64_t horizon);

}  // namespace diamond
