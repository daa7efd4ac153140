#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "sigkit/errors.hpp"
#include "sigkit/rational.hpp"
#include "sigkit/subset.hpp"

namespace sigkit {

/// σ(1), ..., σ(n) as 1-indexed component labels.
using Permutation = std::vector<int>;

/// Explicit enumeration of orderings is capped at 8! = 40320 entries.
inline constexpr int kMaxModelComponents = 8;

bool is_permutation_of(const Permutation& sigma, int n);

/// suffix[k] = {σ(k+1), ..., σ(n)} for k = 0..n: the components still alive
/// after the k-th failure when T_σ(1) < ... < T_σ(n).
std::vector<Subset> suffix_sets(const Permutation& sigma);

std::string format_permutation(const Permutation& sigma);

namespace detail {

template <class Scalar>
bool is_negative(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return x.sign() < 0;
  } else {
    return x < Scalar(0);
  }
}

template <class Scalar>
bool is_one(const Scalar& total) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return total == Rational(1);
  } else {
    return std::abs(total - 1.0) <= 1e-9;
  }
}

}  // namespace detail

/// Probability law on the orderings of the component lifetimes:
/// probability(σ) = Pr(T_σ(1) < ... < T_σ(n)). Sparse; absent means zero.
///
/// Scalar = Rational for exact models; Scalar = double only for empirical
/// frequencies, which never feed the exact code paths.
template <class Scalar>
class PermutationModel {
 public:
  /// Throws SizeLimitExceeded, InputError (bad key), InvariantViolation
  /// (negative mass or total ≠ 1; exact for Rational, 1e-9 for double).
  static PermutationModel create(int n, std::map<Permutation, Scalar> probs) {
    if (n < 1 || n > kMaxModelComponents) {
      throw SizeLimitExceeded("permutation model needs 1 <= n <= " + std::to_string(kMaxModelComponents));
    }
    Scalar total(0);
    for (auto it = probs.begin(); it != probs.end();) {
      if (!is_permutation_of(it->first, n)) {
        throw InputError("key " + format_permutation(it->first) + " is not a permutation of [" + std::to_string(n) +
                         "]");
      }
      if (detail::is_negative(it->second)) {
        throw InvariantViolation("negative probability for " + format_permutation(it->first));
      }
      total += it->second;
      if (it->second == Scalar(0)) {
        it = probs.erase(it);
      } else {
        ++it;
      }
    }
    if (!detail::is_one(total)) throw InvariantViolation("permutation probabilities do not sum to 1");
    PermutationModel m;
    m.n_ = n;
    m.probs_ = std::move(probs);
    return m;
  }

  int n() const { return n_; }
  const std::map<Permutation, Scalar>& probabilities() const { return probs_; }

  Scalar probability(const Permutation& sigma) const {
    auto it = probs_.find(sigma);
    return it == probs_.end() ? Scalar(0) : it->second;
  }

 private:
  int n_ = 0;
  std::map<Permutation, Scalar> probs_;
};

/// Every ordering equally likely: probability 1/n! each.
PermutationModel<Rational> uniform_model(int n);

/// Relative quality function q(A): the probability that the |A| longest
/// lived components are exactly those of A. q(∅) = q([n]) = 1.
template <class Scalar>
class QualityFunction {
 public:
  QualityFunction(int n, std::vector<Scalar> values) : n_(n), values_(std::move(values)) {
    if (values_.size() != (std::size_t{1} << n)) throw DimensionMismatch("quality table has wrong size");
  }

  int n() const { return n_; }
  const Scalar& operator()(Subset a) const { return values_[a]; }
  const std::vector<Scalar>& values() const { return values_; }

 private:
  int n_;
  std::vector<Scalar> values_;
};

template <class Scalar>
QualityFunction<Scalar> q_from_model(const PermutationModel<Scalar>& model) {
  const int n = model.n();
  std::vector<Scalar> values(std::size_t{1} << n, Scalar(0));
  for (const auto& [sigma, p] : model.probabilities()) {
    const auto suffix = suffix_sets(sigma);
    for (int k = 1; k < n; ++k) values[suffix[k]] += p;
  }
  values[0] = Scalar(1);
  values[full_set(n)] = Scalar(1);
  return QualityFunction<Scalar>(n, std::move(values));
}

/// q(A) = 1 / C(n, |A|), the quality function of equally likely orderings.
/// Dense over 2^n sets; n is bounded by the truth-table limit.
QualityFunction<Rational> uniform_quality(int n);

/// q₀(A, B): the bivariate relative quality under equally likely orderings.
/// Throws SubsetOutOfRange.
Rational q0(int n, Subset a, Subset b);

/// m-set generalization of q₀: nonzero only when the sets form a chain.
/// Throws SubsetOutOfRange, EmptySetList.
Rational q0_multi(int n, std::span<const Subset> sets);

/// (n-c₁)!(c₁-c₂)!⋯(c_{m-1}-c_m)! c_m! / n! for sizes c₁ ≥ c₂ ≥ ... ≥ c_m.
Rational chain_coefficient(int n, std::span<const int> sizes_descending);

/// Bivariate relative quality q(A,B), with q(A,∅) = q(A,[n]) = q(A) and
/// the symmetric conventions. Either the closed form q₀ or a sparse table
/// holding the nonzero pairs accumulated from a permutation model.
template <class Scalar>
class BivariateQuality {
 public:
  static BivariateQuality uniform(int n) {
    if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
    BivariateQuality q;
    q.n_ = n;
    q.uniform_ = true;
    return q;
  }

  static BivariateQuality from_model(const PermutationModel<Scalar>& model) {
    BivariateQuality q;
    q.n_ = model.n();
    q.uniform_ = false;
    const int n = model.n();
    for (const auto& [sigma, p] : model.probabilities()) {
      const auto suffix = suffix_sets(sigma);
      for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= n; ++l) q.table_[key(suffix[k], suffix[l])] += p;
      }
    }
    return q;
  }

  int n() const { return n_; }
  bool is_uniform() const { return uniform_; }

  Scalar operator()(Subset a, Subset b) const {
    if (uniform_) return scalar_cast<Scalar>(q0(n_, a, b));
    auto it = table_.find(key(a, b));
    return it == table_.end() ? Scalar(0) : it->second;
  }

  /// Calls f(A, B, q(A,B)) for every pair with q(A,B) ≠ 0 (every nested
  /// pair in the uniform case). Order is unspecified.
  template <class F>
  void for_each_nonzero(F&& f) const {
    if (!uniform_) {
      for (const auto& [k, v] : table_) f(static_cast<Subset>(k & 0xffffffffu), static_cast<Subset>(k >> 32), v);
      return;
    }
    const Subset full = full_set(n_);
    for (Subset a = 0;; ++a) {
      for_each_submask(a, [&](Subset b) { f(a, b, (*this)(a, b)); });
      for_each_submask(full & ~a, [&](Subset extra) {
        if (extra != 0) f(a, a | extra, (*this)(a, a | extra));
      });
      if (a == full) break;
    }
  }

  QualityFunction<Scalar> marginal() const {
    std::vector<Scalar> values(std::size_t{1} << n_);
    for (std::size_t a = 0; a < values.size(); ++a) values[a] = (*this)(static_cast<Subset>(a), static_cast<Subset>(a));
    return QualityFunction<Scalar>(n_, std::move(values));
  }

 private:
  static std::uint64_t key(Subset a, Subset b) { return std::uint64_t{a} | (std::uint64_t{b} << 32); }

  int n_ = 0;
  bool uniform_ = true;
  std::unordered_map<std::uint64_t, Scalar> table_;
};

/// Sum of Pr(E_σ) over σ whose top-|A| and top-|B| sets are A, B.
template <class Scalar>
BivariateQuality<Scalar> q_bivariate_from_model(const PermutationModel<Scalar>& model) {
  return BivariateQuality<Scalar>::from_model(model);
}

/// m-variate relative quality from a permutation model, as a sparse map
/// from set tuples (A₁, ..., A_m) to probability. Only tuples of suffix
/// sets of some supported ordering appear.
std::map<std::vector<Subset>, Rational> q_multi_from_model(const PermutationModel<Rational>& model, int m);

}  // namespace sigkit
