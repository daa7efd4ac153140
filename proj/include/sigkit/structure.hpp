#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sigkit/subset.hpp"

namespace sigkit {

/// A semicoherent structure function φ on n components, stored as a dense
/// truth table indexed by subset mask (index 0 = ∅).
///
/// Invariants, enforced by every constructor: φ(∅) = 0, φ([n]) = 1 and
/// A ⊆ B ⇒ φ(A) ≤ φ(B). Irrelevant components are allowed.
class StructureFunction {
 public:
  /// Validates and wraps a truth table of 2^n entries.
  /// Throws NotSemicoherent, SizeLimitExceeded, DimensionMismatch.
  static StructureFunction from_truth_table(int n, std::span<const bool> table);

  /// "0001"-style table, one character per subset in mask order.
  static StructureFunction from_truth_table(int n, std::string_view bits);

  /// φ(A) = 1 iff some path is contained in A. Paths are 1-indexed labels;
  /// duplicates are dropped but non-minimal paths are kept as given.
  /// Throws EmptyPathList, PathOutOfRange, SizeLimitExceeded.
  static StructureFunction from_min_path_sets(int n, const std::vector<std::vector<int>>& paths);

  /// The system failing at the k-th component failure: φ(A) = 1 iff
  /// |A| ≥ n-k+1. Throws OutOfRange.
  static StructureFunction k_out_of_n(int n, int k);

  int n() const { return n_; }

  bool operator()(Subset a) const { return (words_[a >> 6] >> (a & 63)) & 1u; }

  /// Minimal true sets, in increasing mask order.
  std::vector<Subset> minimal_path_sets() const;

  /// Number of true sets of each cardinality 0..n.
  std::vector<std::uint64_t> true_counts_by_size() const;

  /// Truth table as a string of '0'/'1', index 0 = ∅.
  std::string truth_table_string() const;

  friend bool operator==(const StructureFunction&, const StructureFunction&) = default;

 private:
  StructureFunction(int n, std::vector<std::uint64_t> words) : n_(n), words_(std::move(words)) {}
  void validate() const;

  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// One realization (t_1..t_n) of the component lifetimes: strictly positive
/// and pairwise distinct. Throws InputError otherwise.
class LifetimeSample {
 public:
  explicit LifetimeSample(std::vector<double> times);

  int n() const { return static_cast<int>(times_.size()); }
  std::span<const double> times() const { return times_; }
  double operator[](int component) const { return times_[component]; }

 private:
  std::vector<double> times_;
};

struct SystemFailure {
  double lifetime;
  /// k such that the system lifetime equals T_{k:n}, in [1, n].
  int rank;
};

/// Lifetime of the system and the index of the order statistic it equals.
/// Throws DimensionMismatch.
SystemFailure system_lifetime(const StructureFunction& phi, const LifetimeSample& sample);

/// Ordering of components by failure time: result[j] is the 0-based index
/// of the (j+1)-th failing component.
std::vector<int> failure_order(std::span<const double> times);

}  // namespace sigkit
