#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "diamond/bits.hpp"
#include "diamond/guessing.hpp"

namespace diamond {

/// One checked pair c1 < c2 of B: X_{c2} and X_{c1} first differ at `position` < c1.
struct PairCheck {
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
  std::uint64_t position = 0;

  friend bool operator==(const PairCheck&, const PairCheck&) = default;
};

struct DiagonalCertificate {
  /// {0 < n < H : pi(n) > 2^floor(n/2) * n}.
  SetWindow b;
  /// X_n for every nonempty level; on B the diagonal choice, elsewhere the least trace.
  std::map<std::uint64_t, BitString> chosen;
  std::vector<PairCheck> pairs;
  /// Every pair of B was re-checked after selection.
  bool verified = false;
};

/// pi(n) > 2^floor(n/2) * n, with an overflowing side counted as huge.
bool above_diagonal_threshold(const FuncSpec& pi, std::uint64_t n);

/// For every n in B, in increasing order, picks the least X_n in A_n
/// (string order) with X_n restricted to c different from X_c for every
/// earlier c in B. No subject then agrees with two choices on B.
///
/// Requires f = id on the horizon and |A_n| > 2^floor(n/2) * n on B
/// (PreconditionError naming n). Throws PreconditionError naming n when
/// every trace of A_n is blocked.
DiagonalCertificate diagonalize(const GuessingStructure& g);

/// {n in C : X_n is chosen and X ∩ n = X_n}. X must reach every chosen
/// length inside C.
SetWindow check_threadable(const std::map<std::uint64_t, BitString>& chosen, const SetWindow& subject,
                           const SetWindow& c);

}  // namespace diamond
