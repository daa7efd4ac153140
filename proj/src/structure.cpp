#include "sigkit/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigkit/errors.hpp"

namespace sigkit {

namespace {

void check_size(int n) {
  if (n < 1 || n > kMaxComponents) {
    throw SizeLimitExceeded("component count " + std::to_string(n) + " outside [1, " +
                            std::to_string(kMaxComponents) + "]");
  }
}

std::size_t word_count(int n) { return ((std::size_t{1} << n) + 63) / 64; }

void set_bit(std::vector<std::uint64_t>& words, Subset a) { words[a >> 6] |= std::uint64_t{1} << (a & 63); }

}  // namespace

StructureFunction StructureFunction::from_truth_table(int n, std::span<const bool> table) {
  check_size(n);
  if (table.size() != (std::size_t{1} << n)) {
    throw DimensionMismatch("truth table has " + std::to_string(table.size()) + " entries, expected 2^" +
                            std::to_string(n));
  }
  std::vector<std::uint64_t> words(word_count(n), 0);
  for (std::size_t a = 0; a < table.size(); ++a) {
    if (table[a]) set_bit(words, static_cast<Subset>(a));
  }
  StructureFunction phi(n, std::move(words));
  phi.validate();
  return phi;
}

StructureFunction StructureFunction::from_truth_table(int n, std::string_view bits) {
  check_size(n);
  if (bits.size() != (std::size_t{1} << n)) {
    throw DimensionMismatch("truth table has " + std::to_string(bits.size()) + " characters, expected 2^" +
                            std::to_string(n));
  }
  std::vector<std::uint64_t> words(word_count(n), 0);
  for (std::size_t a = 0; a < bits.size(); ++a) {
    if (bits[a] == '1') {
      set_bit(words, static_cast<Subset>(a));
    } else if (bits[a] != '0') {
      throw ParseError(std::string("truth table character '") + bits[a] + "' is not 0 or 1");
    }
  }
  StructureFunction phi(n, std::move(words));
  phi.validate();
  return phi;
}

StructureFunction StructureFunction::from_min_path_sets(int n, const std::vector<std::vector<int>>& paths) {
  check_size(n);
  if (paths.empty()) throw EmptyPathList("no path sets given");
  std::vector<Subset> masks;
  for (const auto& path : paths) {
    if (path.empty()) throw PathOutOfRange("empty path set");
    Subset mask = 0;
    for (int label : path) {
      if (label < 1 || label > n) {
        throw PathOutOfRange("path component " + std::to_string(label) + " outside [1, " + std::to_string(n) + "]");
      }
      mask |= Subset{1} << (label - 1);
    }
    masks.push_back(mask);
  }
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());

  // Up-closure of the paths: seed each path, then propagate along single
  // element additions in increasing mask order.
  std::vector<std::uint64_t> words(word_count(n), 0);
  for (Subset p : masks) set_bit(words, p);
  const Subset full = full_set(n);
  for (Subset a = 0;; ++a) {
    if ((words[a >> 6] >> (a & 63)) & 1u) {
      for (Subset rest = full & ~a; rest != 0; rest &= rest - 1) set_bit(words, a | (rest & (~rest + 1)));
    }
    if (a == full) break;
  }
  StructureFunction phi(n, std::move(words));
  phi.validate();
  return phi;
}

StructureFunction StructureFunction::k_out_of_n(int n, int k) {
  check_size(n);
  if (k < 1 || k > n) {
    throw OutOfRange("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<std::uint64_t> words(word_count(n), 0);
  const Subset full = full_set(n);
  for (Subset a = 0;; ++a) {
    if (cardinality(a) >= n - k + 1) set_bit(words, a);
    if (a == full) break;
  }
  return StructureFunction(n, std::move(words));
}

void StructureFunction::validate() const {
  const Subset full = full_set(n_);
  // Monotonicity first so a pair witness is reported when one exists.
  for (Subset a = 0;; ++a) {
    if ((*this)(a)) {
      for (Subset rest = full & ~a; rest != 0; rest &= rest - 1) {
        const Subset b = a | (rest & (~rest + 1));
        if (!(*this)(b)) {
          throw NotSemicoherent("structure function is not monotone: phi(" + format_subset(a) + ") = 1 but phi(" +
                                    format_subset(b) + ") = 0",
                                a, b);
        }
      }
    }
    if (a == full) break;
  }
  if ((*this)(0)) throw NotSemicoherent("structure function is 1 on the empty set", 0, 0);
  if (!(*this)(full)) {
    throw NotSemicoherent("structure function is 0 on the full set " + format_subset(full), full, full);
  }
}

std::vector<Subset> StructureFunction::minimal_path_sets() const {
  std::vector<Subset> out;
  const Subset full = full_set(n_);
  for (Subset a = 1;; ++a) {
    if ((*this)(a)) {
      bool minimal = true;
      for (Subset rest = a; rest != 0 && minimal; rest &= rest - 1) {
        if ((*this)(a & ~(rest & (~rest + 1)))) minimal = false;
      }
      if (minimal) out.push_back(a);
    }
    if (a == full) break;
  }
  return out;
}

std::vector<std::uint64_t> StructureFunction::true_counts_by_size() const {
  std::vector<std::uint64_t> counts(n_ + 1, 0);
  const Subset full = full_set(n_);
  for (Subset a = 0;; ++a) {
    if ((*this)(a)) ++counts[cardinality(a)];
    if (a == full) break;
  }
  return counts;
}

std::string StructureFunction::truth_table_string() const {
  std::string out(std::size_t{1} << n_, '0');
  for (std::size_t a = 0; a < out.size(); ++a) {
    if ((*this)(static_cast<Subset>(a))) out[a] = '1';
  }
  return out;
}

LifetimeSample::LifetimeSample(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty()) throw InputError("lifetime sample is empty");
  for (double t : times_) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("lifetimes must be finite and strictly positive");
  }
  std::vector<double> sorted = times_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("lifetime sample has ties");
  }
}

std::vector<int> failure_order(std::span<const double> times) {
  std::vector<int> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return times[a] < times[b]; });
  return order;
}

SystemFailure system_lifetime(const StructureFunction& phi, const LifetimeSample& sample) {
  if (sample.n() != phi.n()) {
    throw DimensionMismatch("sample has " + std::to_string(sample.n()) + " lifetimes, system has " +
                            std::to_string(phi.n()) + " components");
  }
  const auto order = failure_order(sample.times());
  Subset alive = full_set(phi.n());
  for (int j = 0; j < phi.n(); ++j) {
    alive &= ~(Subset{1} << order[j]);
    if (!phi(alive)) return {sample[order[j]], j + 1};
  }
  // Unreachable for a semicoherent φ since φ(∅) = 0.
  throw InvariantViolation("system never failed");
}

}  // namespace sigkit
