#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sigkit/errors.hpp"
#include "sigkit/parallel.hpp"
#include "sigkit/quality.hpp"
#include "sigkit/rational.hpp"
#include "sigkit/structure.hpp"

namespace sigkit {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Layouts. Signatures are 1-indexed in the math and 0-based here:
//   signature vector s (size n):        s(k-1)    = s_k,      k in [n]
//   tail vector S̄ (size n+1):           t(k)      = S̄_k,      k in 0..n
//   signature matrix p (n x n):         p(k-1,l-1) = p_{k,l}
//   tail matrix P̄ ((n+1) x (n+1)):      P(k,l)    = P̄_{k,l}

/// Exact comparisons for Rational; absolute tolerance for floating types.
template <class Scalar>
struct Tolerance {
  static bool le(const Scalar& a, const Scalar& b) { return a <= b + Scalar(1e-9); }
  static bool eq(const Scalar& a, const Scalar& b) { return std::abs(a - b) <= Scalar(1e-9); }
};

template <>
struct Tolerance<Rational> {
  static bool le(const Rational& a, const Rational& b) { return a <= b; }
  static bool eq(const Rational& a, const Rational& b) { return a == b; }
};

/// (n+1) x n matrix L with L(k, i-1) = 1 iff i > k, so that S̄ = L s and
/// P̄ = L p Lᵀ.
template <class Scalar>
Matrix<Scalar> suffix_sum_operator(int n) {
  Matrix<Scalar> op = Matrix<Scalar>::Zero(n + 1, n);
  for (int k = 0; k <= n; ++k) {
    for (int i = k + 1; i <= n; ++i) op(k, i - 1) = Scalar(1);
  }
  return op;
}

/// n x (n+1) backward difference D with (D t)(k-1) = t(k-1) - t(k), so that
/// s = D S̄ and p = D P̄ Dᵀ.
template <class Scalar>
Matrix<Scalar> difference_operator(int n) {
  Matrix<Scalar> op = Matrix<Scalar>::Zero(n, n + 1);
  for (int k = 1; k <= n; ++k) {
    op(k - 1, k - 1) = Scalar(1);
    op(k - 1, k) = Scalar(-1);
  }
  return op;
}

template <class Scalar>
void validate_signature(const Vector<Scalar>& s) {
  Scalar total(0);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (!Tolerance<Scalar>::le(Scalar(0), s(k))) {
      throw InvariantViolation("signature entry s_" + std::to_string(k + 1) + " is negative");
    }
    total += s(k);
  }
  if (!Tolerance<Scalar>::eq(total, Scalar(1))) throw InvariantViolation("signature does not sum to 1");
}

template <class Scalar>
void validate_tail(const Vector<Scalar>& t) {
  const Eigen::Index n = t.size() - 1;
  if (n < 1) throw InvariantViolation("tail vector needs at least two entries");
  if (!Tolerance<Scalar>::eq(t(0), Scalar(1))) throw InvariantViolation("tail entry 0 is not 1");
  if (!Tolerance<Scalar>::eq(t(n), Scalar(0))) throw InvariantViolation("tail entry n is not 0");
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (!Tolerance<Scalar>::le(t(k), t(k - 1))) {
      throw InvariantViolation("tail increases at k = " + std::to_string(k));
    }
  }
}

template <class Scalar>
void validate_joint_signature(const Matrix<Scalar>& p) {
  if (p.rows() != p.cols() || p.rows() < 1) throw InvariantViolation("signature matrix must be square");
  Scalar total(0);
  for (Eigen::Index k = 0; k < p.rows(); ++k) {
    for (Eigen::Index l = 0; l < p.cols(); ++l) {
      if (!Tolerance<Scalar>::le(Scalar(0), p(k, l))) {
        throw InvariantViolation("signature matrix entry (" + std::to_string(k + 1) + "," + std::to_string(l + 1) +
                                 ") is negative");
      }
      total += p(k, l);
    }
  }
  if (!Tolerance<Scalar>::eq(total, Scalar(1))) throw InvariantViolation("signature matrix does not sum to 1");
}

template <class Scalar>
void validate_joint_tail(const Matrix<Scalar>& t) {
  if (t.rows() != t.cols() || t.rows() < 2) throw InvariantViolation("tail matrix must be square of order >= 2");
  const Eigen::Index n = t.rows() - 1;
  if (!Tolerance<Scalar>::eq(t(0, 0), Scalar(1))) throw InvariantViolation("tail matrix entry (0,0) is not 1");
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (!Tolerance<Scalar>::eq(t(n, i), Scalar(0)) || !Tolerance<Scalar>::eq(t(i, n), Scalar(0))) {
      throw InvariantViolation("tail matrix is nonzero in row or column n");
    }
  }
  for (Eigen::Index k = 0; k <= n; ++k) {
    for (Eigen::Index l = 0; l <= n; ++l) {
      if ((k > 0 && !Tolerance<Scalar>::le(t(k, l), t(k - 1, l))) ||
          (l > 0 && !Tolerance<Scalar>::le(t(k, l), t(k, l - 1)))) {
        throw InvariantViolation("tail matrix increases at (" + std::to_string(k) + "," + std::to_string(l) + ")");
      }
    }
  }
}

/// S̄_k = Σ_{i>k} s_i. Throws InvariantViolation on an invalid signature.
template <class Scalar>
Vector<Scalar> tail_from_signature(const Vector<Scalar>& s) {
  validate_signature(s);
  return suffix_sum_operator<Scalar>(static_cast<int>(s.size())) * s;
}

/// s_k = S̄_{k-1} - S̄_k. Throws InvariantViolation on an invalid tail.
template <class Scalar>
Vector<Scalar> signature_from_tail(const Vector<Scalar>& t) {
  validate_tail(t);
  Vector<Scalar> s = difference_operator<Scalar>(static_cast<int>(t.size()) - 1) * t;
  validate_signature(s);
  return s;
}

/// P̄_{k,l} = Σ_{i>k} Σ_{j>l} p_{i,j}.
template <class Scalar>
Matrix<Scalar> tail_from_joint(const Matrix<Scalar>& p) {
  validate_joint_signature(p);
  const Matrix<Scalar> op = suffix_sum_operator<Scalar>(static_cast<int>(p.rows()));
  return op * p * op.transpose();
}

/// p_{k,l} = P̄_{k-1,l-1} - P̄_{k,l-1} - P̄_{k-1,l} + P̄_{k,l}.
template <class Scalar>
Matrix<Scalar> joint_from_tail(const Matrix<Scalar>& t) {
  validate_joint_tail(t);
  const Matrix<Scalar> op = difference_operator<Scalar>(static_cast<int>(t.rows()) - 1);
  Matrix<Scalar> p = op * t * op.transpose();
  validate_joint_signature(p);
  return p;
}

/// Boland's formula: s_k = Σ_{|A|=n-k+1} φ(A)/C(n,|A|) - Σ_{|A|=n-k} φ(A)/C(n,|A|).
Vector<Rational> boland_signature(const StructureFunction& phi);

/// Tail structure signature S̄_k = Σ_{|A|=n-k} φ(A)/C(n,|A|).
Vector<Rational> structure_tail(const StructureFunction& phi);

/// P̄_k = Σ_{|A|=n-k} q(A) φ(A). Throws DimensionMismatch.
template <class Scalar>
Vector<Scalar> probability_tail(const StructureFunction& phi, const QualityFunction<Scalar>& q) {
  if (q.n() != phi.n()) throw DimensionMismatch("quality function and structure differ in n");
  const int n = phi.n();
  Vector<Scalar> t = Vector<Scalar>::Zero(n + 1);
  const Subset full = full_set(n);
  for (Subset a = 0;; ++a) {
    if (phi(a)) t(n - cardinality(a)) += q(a);
    if (a == full) break;
  }
  return t;
}

/// p_k = P̄_{k-1} - P̄_k. A negative entry (invalid q) raises
/// InvariantViolation naming k.
template <class Scalar>
Vector<Scalar> probability_signature(const StructureFunction& phi, const QualityFunction<Scalar>& q) {
  const Vector<Scalar> t = probability_tail(phi, q);
  Vector<Scalar> p = difference_operator<Scalar>(phi.n()) * t;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (!Tolerance<Scalar>::le(Scalar(0), p(k))) {
      throw InvariantViolation("probability signature entry p_" + std::to_string(k + 1) + " is negative");
    }
  }
  validate_signature(p);
  return p;
}

/// Joint tail structure signature S̄_{k,l} = Σ_{|A|=n-k} Σ_{|B|=n-l} q₀(A,B) φ₁(A) φ₂(B).
///
/// Never enumerates orderings: counts nested pairs with a subset-sum
/// transform per cardinality, so it runs up to the truth-table limit.
/// Per-cardinality work is spread over par.threads; results do not depend
/// on the thread count. Throws DimensionMismatch.
Matrix<Rational> joint_structure_tail(const StructureFunction& phi1, const StructureFunction& phi2,
                                      Parallelism par = {});

/// Joint tail P̄_{k,l} = Σ_{|A|=n-k} Σ_{|B|=n-l} q(A,B) φ₁(A) φ₂(B).
/// Throws DimensionMismatch.
template <class Scalar>
Matrix<Scalar> joint_tail(const StructureFunction& phi1, const StructureFunction& phi2,
                          const BivariateQuality<Scalar>& q) {
  if (phi1.n() != phi2.n() || phi1.n() != q.n()) throw DimensionMismatch("systems and quality differ in n");
  if constexpr (std::is_same_v<Scalar, Rational>) {
    if (q.is_uniform()) return joint_structure_tail(phi1, phi2);
  }
  const int n = phi1.n();
  Matrix<Scalar> t = Matrix<Scalar>::Zero(n + 1, n + 1);
  q.for_each_nonzero([&](Subset a, Subset b, const Scalar& v) {
    if (phi1(a) && phi2(b)) t(n - cardinality(a), n - cardinality(b)) += v;
  });
  validate_joint_tail(t);
  return t;
}

template <class Scalar>
Matrix<Scalar> joint_signature(const StructureFunction& phi1, const StructureFunction& phi2,
                               const BivariateQuality<Scalar>& q) {
  return joint_from_tail(joint_tail(phi1, phi2, q));
}

/// Joint structure signature s (the q₀ case).
Matrix<Rational> joint_structure_signature(const StructureFunction& phi1, const StructureFunction& phi2,
                                           Parallelism par = {});

/// Dense m-dimensional array with every extent n+1, row-major (last index
/// fastest). Holds P̄_{k₁,...,k_m}.
class MultiTail {
 public:
  MultiTail(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }
  std::size_t size() const { return data_.size(); }

  Rational& at(std::span<const int> index) { return data_[offset(index)]; }
  const Rational& at(std::span<const int> index) const { return data_[offset(index)]; }
  const std::vector<Rational>& flat() const { return data_; }
  Rational& flat(std::size_t i) { return data_[i]; }

  /// Multi-index of flat position i.
  std::vector<int> index_of(std::size_t i) const;

  friend bool operator==(const MultiTail&, const MultiTail&) = default;

 private:
  std::size_t offset(std::span<const int> index) const;

  int n_;
  int m_;
  std::vector<Rational> data_;
};

/// Budget on (n+1)^m cells for multi_tail.
inline constexpr std::size_t kMultiCellBudget = std::size_t{1} << 20;

/// m-variate tail under equally likely orderings, via q0_multi over chains.
/// Throws DimensionMismatch, SizeLimitExceeded, EmptySetList.
MultiTail multi_tail_uniform(std::span<const StructureFunction> phis, Parallelism par = {});

/// m-variate tail for a general ordering law, via the m-variate
/// permutation-sum form of q(A₁, ..., A_m).
MultiTail multi_tail(std::span<const StructureFunction> phis, const PermutationModel<Rational>& model);

}  // namespace sigkit
