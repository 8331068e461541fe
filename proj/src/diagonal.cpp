#include "diamond/diagonal.hpp"

#include <string>

#include "diamond/error.hpp"

namespace diamond {

namespace {

// floor(n/2)-th power of two times n, or nullopt past 64 bits.
std::optional<std::uint64_t> threshold(std::uint64_t n) {
  const std::uint64_t half = n / 2;
  if (half >= 64) return std::nullopt;
  const std::uint64_t p = std::uint64_t{1} << half;
  if (n != 0 && p > UINT64_MAX / n) return std::nullopt;
  return p * n;
}

std::optional<std::uint64_t> first_difference(BitView a, BitView b) {
  const std::uint64_t len = std::min(a.size, b.size);
  std::size_t i = 0;
  std::size_t j = 0;
  while (true) {
    const std::uint64_t pa = i < a.ones.size() ? a.ones[i] : len;
    const std::uint64_t pb = j < b.ones.size() ? b.ones[j] : len;
    const std::uint64_t p = std::min(pa, pb);
    if (p >= len) return std::nullopt;
    if (pa != pb) return p;
    ++i;
    ++j;
  }
}

}  // namespace

bool above_diagonal_threshold(const FuncSpec& pi, std::uint64_t n) {
  const auto p = pi.try_eval(n);
  const auto t = threshold(n);
  if (!p) return true;
  if (!t) return false;
  return *p > *t;
}

DiagonalCertificate diagonalize(const GuessingStructure& g) {
  const std::uint64_t h = g.horizon();
  for (std::uint64_t n = 0; n < h; ++n) {
    if (g.f()(n) != n) {
      throw PreconditionError("diagonalize needs f = id; f(" + std::to_string(n) + ") = " + std::to_string(g.f()(n)));
    }
  }
  DiagonalCertificate cert;
  cert.b = SetWindow(h);
  for (std::uint64_t n = 1; n < h; ++n) {
    if (above_diagonal_threshold(g.pi(), n)) cert.b.set(n);
  }

  std::vector<std::uint64_t> earlier;
  for (std::uint64_t n = 0; n < h; ++n) {
    const auto level = g.level(n);
    if (!cert.b.test(n)) {
      if (!level.empty()) cert.chosen.emplace(n, level.front());
      continue;
    }
    const auto t = threshold(n);
    if (!t || level.size() <= *t) {
      throw PreconditionError("counting hypothesis fails at n = " + std::to_string(n) + ": |A_n| = " +
                              std::to_string(level.size()));
    }
    const BitString* pick = nullptr;
    for (const BitString& x : level) {
      bool blocked = false;
      for (std::uint64_t c : earlier) {
        if (equal(restrict_view(x.view(), c), cert.chosen.at(c).view())) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        pick = &x;
        break;
      }
    }
    if (pick == nullptr) {
      throw PreconditionError("every trace of A_n is blocked by an earlier choice at n = " + std::to_string(n));
    }
    cert.chosen.emplace(n, *pick);
    earlier.push_back(n);
  }

  cert.verified = true;
  for (std::size_t i = 0; i < earlier.size(); ++i) {
    for (std::size_t j = i + 1; j < earlier.size(); ++j) {
      const std::uint64_t c1 = earlier[i];
      const std::uint64_t c2 = earlier[j];
      const auto d = first_difference(cert.chosen.at(c1).view(), cert.chosen.at(c2).view());
      if (!d) {
        cert.verified = false;
        continue;
      }
      cert.pairs.push_back({c1, c2, *d});
    }
  }
  return cert;
}

SetWindow check_threadable(const std::map<std::uint64_t, BitString>& chosen, const SetWindow& subject,
                           const SetWindow& c) {
  const MemberIndex x(subject);
  SetWindow agreement(c.horizon());
  for (const auto& [n, xn] : chosen) {
    if (!c.test(n)) continue;
    if (xn.size() > subject.horizon()) {
      throw HorizonError("subject horizon " + std::to_string(subject.horizon()) + " below chosen length " +
                         std::to_string(xn.size()) + " at level " + std::to_string(n));
    }
    if (equal(x.prefix(xn.size()), xn.view())) agreement.set(n);
  }
  return agreement;
}

}  // namespace diamond
