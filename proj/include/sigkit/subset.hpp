#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sigkit {

/// A subset of the components {1..n}, bit i-1 standing for component i.
using Subset = std::uint32_t;

/// Truth tables are dense, so n is capped (2^24 bits = 2 MiB).
inline constexpr int kMaxComponents = 24;

inline int cardinality(Subset s) { return std::popcount(s); }

inline Subset full_set(int n) { return n >= 32 ? ~Subset{0} : (Subset{1} << n) - 1; }

inline bool is_subset(Subset a, Subset b) { return (a & ~b) == 0; }

inline bool nested(Subset a, Subset b) { return is_subset(a, b) || is_subset(b, a); }

/// Calls f(s) for every s in {1..n} with |s| = k, in increasing mask order.
template <class F>
void for_each_subset_of_size(int n, int k, F&& f) {
  if (k < 0 || k > n) return;
  if (k == 0) {
    f(Subset{0});
    return;
  }
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t s = (std::uint64_t{1} << k) - 1;
  while (s < limit) {
    f(static_cast<Subset>(s));
    // Gosper's hack: next mask with the same popcount.
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

/// Calls f(s) for every s contained in mask, including 0 and mask itself.
template <class F>
void for_each_submask(Subset mask, F&& f) {
  Subset s = mask;
  while (true) {
    f(s);
    if (s == 0) break;
    s = (s - 1) & mask;
  }
}

/// Builds a mask from 1-indexed component labels. Throws SubsetOutOfRange.
Subset subset_from_labels(std::span<const int> labels, int n);

/// 1-indexed labels of the members of s, ascending.
std::vector<int> labels_of(Subset s);

/// "{1,3}" style rendering, used in error messages.
std::string format_subset(Subset s);

}  // namespace sigkit
