#pragma once

// Test-only generators and brute-force oracles. The oracles deliberately
// avoid the library's own helpers (suffix sets, subset transforms, q
// tables) and work straight from the definitions.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "sigkit/quality.hpp"
#include "sigkit/signature.hpp"
#include "sigkit/structure.hpp"

namespace sigkit::test {

using Rng = std::mt19937_64;

/// φ on n components from path sets, by direct definition.
inline std::string table_from_paths(int n, const std::vector<Subset>& paths) {
  std::string bits(std::size_t{1} << n, '0');
  for (std::size_t a = 0; a < bits.size(); ++a) {
    for (Subset p : paths) {
      if ((p & ~static_cast<Subset>(a)) == 0) bits[a] = '1';
    }
  }
  return bits;
}

inline std::vector<Subset> random_paths(int n, Rng& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_int_distribution<Subset> mask(1, (Subset{1} << n) - 1);
  std::vector<Subset> paths(count(rng));
  for (auto& p : paths) p = mask(rng);
  return paths;
}

inline StructureFunction random_structure(int n, Rng& rng) {
  return StructureFunction::from_truth_table(n, table_from_paths(n, random_paths(n, rng)));
}

/// Random exact model: a handful of orderings with integer weights.
inline PermutationModel<Rational> random_model(int n, Rng& rng) {
  Permutation sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  std::uniform_int_distribution<int> support(1, 12);
  std::uniform_int_distribution<int> weight(1, 9);
  std::map<Permutation, long> weights;
  const int draws = support(rng);
  long total = 0;
  for (int i = 0; i < draws; ++i) {
    std::shuffle(sigma.begin(), sigma.end(), rng);
    const int w = weight(rng);
    weights[sigma] += w;
    total += w;
  }
  std::map<Permutation, Rational> probs;
  for (const auto& [s, w] : weights) probs[s] = Rational(w, total);
  return PermutationModel<Rational>::create(n, std::move(probs));
}

/// Random stochastic vector of exact rationals.
inline Vector<Rational> random_signature(int n, Rng& rng) {
  std::uniform_int_distribution<int> weight(0, 5);
  std::vector<long> w(n);
  long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& x : w) total += (x = weight(rng));
  }
  Vector<Rational> s(n);
  for (int k = 0; k < n; ++k) s(k) = Rational(w[k], total);
  return s;
}

inline Matrix<Rational> random_joint_signature(int n, Rng& rng) {
  std::uniform_int_distribution<int> weight(0, 5);
  std::vector<long> w(n * n);
  long total = 0;
  while (total == 0) {
    total = 0;
    for (auto& x : w) total += (x = weight(rng));
  }
  Matrix<Rational> p(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) p(k, l) = Rational(w[k * n + l], total);
  }
  return p;
}

/// Alive set after the first k failures under ordering sigma.
inline Subset alive_after(const Permutation& sigma, int k) {
  Subset alive = 0;
  for (std::size_t i = k; i < sigma.size(); ++i) alive |= Subset{1} << (sigma[i] - 1);
  return alive;
}

/// P̄_{k,l} = Σ_σ Pr(E_σ) φ₁({σ(k+1..n)}) φ₂({σ(l+1..n)}).
inline Matrix<Rational> brute_joint_tail(const StructureFunction& phi1, const StructureFunction& phi2,
                                         const PermutationModel<Rational>& model) {
  const int n = phi1.n();
  Matrix<Rational> t = Matrix<Rational>::Zero(n + 1, n + 1);
  Permutation sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  do {
    const Rational p = model.probability(sigma);
    if (p.is_zero()) continue;
    for (int k = 0; k <= n; ++k) {
      for (int l = 0; l <= n; ++l) {
        if (phi1(alive_after(sigma, k)) && phi2(alive_after(sigma, l))) t(k, l) += p;
      }
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return t;
}

/// Equally likely orderings, built without the library.
inline PermutationModel<Rational> brute_uniform(int n) {
  Permutation sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  std::map<Permutation, Rational> probs;
  long count = 0;
  do ++count;
  while (std::next_permutation(sigma.begin(), sigma.end()));
  do probs[sigma] = Rational(1, count);
  while (std::next_permutation(sigma.begin(), sigma.end()));
  return PermutationModel<Rational>::create(n, std::move(probs));
}

/// Distribution of the failure rank of φ under a model, by enumeration.
inline Vector<Rational> brute_signature(const StructureFunction& phi, const PermutationModel<Rational>& model) {
  const int n = phi.n();
  Vector<Rational> s = Vector<Rational>::Zero(n);
  for (const auto& [sigma, p] : model.probabilities()) {
    for (int k = 1; k <= n; ++k) {
      if (!phi(alive_after(sigma, k))) {
        s(k - 1) += p;
        break;
      }
    }
  }
  return s;
}

inline Matrix<Rational> pair_tail() {
  const long rows[5][5] = {{12, 9, 4, 0, 0}, {6, 3, 1, 0, 0}, {2, 1, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
  Matrix<Rational> t(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) t(i, j) = Rational(rows[i][j], 12);
  }
  return t;
}

inline Matrix<Rational> pair_signature() {
  const long rows[4][4] = {{0, 3, 3, 0}, {2, 1, 1, 0}, {1, 1, 0, 0}, {0, 0, 0, 0}};
  Matrix<Rational> s(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) s(i, j) = Rational(rows[i][j], 12);
  }
  return s;
}

inline StructureFunction pair_phi1() { return StructureFunction::from_min_path_sets(4, {{1, 2}}); }
inline StructureFunction pair_phi2() { return StructureFunction::from_min_path_sets(4, {{2, 4}, {3, 4}}); }

inline Vector<Rational> rational_vector(std::initializer_list<long> nums, long den) {
  Vector<Rational> v(static_cast<Eigen::Index>(nums.size()));
  Eigen::Index i = 0;
  for (long x : nums) v(i++) = Rational(x, den);
  return v;
}

}  // namespace sigkit::test
