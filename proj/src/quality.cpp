#include "sigkit/quality.hpp"

namespace sigkit {

bool is_permutation_of(const Permutation& sigma, int n) {
  if (static_cast<int>(sigma.size()) != n) return false;
  std::vector<bool> seen(n + 1, false);
  for (int v : sigma) {
    if (v < 1 || v > n || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

std::vector<Subset> suffix_sets(const Permutation& sigma) {
  const int n = static_cast<int>(sigma.size());
  std::vector<Subset> suffix(n + 1, 0);
  for (int k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] | (Subset{1} << (sigma[k] - 1));
  return suffix;
}

std::string format_permutation(const Permutation& sigma) {
  std::string out = "(";
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(sigma[i]);
  }
  return out + ")";
}

PermutationModel<Rational> uniform_model(int n) {
  if (n < 1 || n > kMaxModelComponents) {
    throw SizeLimitExceeded("uniform model needs 1 <= n <= " + std::to_string(kMaxModelComponents));
  }
  const Rational p(mpz_class(1), factorial(n));
  std::map<Permutation, Rational> probs;
  Permutation sigma(n);
  std::iota(sigma.begin(), sigma.end(), 1);
  do {
    probs.emplace(sigma, p);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return PermutationModel<Rational>::create(n, std::move(probs));
}

QualityFunction<Rational> uniform_quality(int n) {
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  std::vector<Rational> by_size;
  for (int k = 0; k <= n; ++k) by_size.emplace_back(mpz_class(1), binomial(n, k));
  std::vector<Rational> values(std::size_t{1} << n);
  for (std::size_t a = 0; a < values.size(); ++a) values[a] = by_size[cardinality(static_cast<Subset>(a))];
  return QualityFunction<Rational>(n, std::move(values));
}

Rational chain_coefficient(int n, std::span<const int> sizes) {
  mpz_class num = factorial(n - sizes.front());
  for (std::size_t i = 1; i < sizes.size(); ++i) num *= factorial(sizes[i - 1] - sizes[i]);
  num *= factorial(sizes.back());
  return Rational(num, factorial(n));
}

Rational q0(int n, Subset a, Subset b) {
  const Subset sets[] = {a, b};
  return q0_multi(n, sets);
}

Rational q0_multi(int n, std::span<const Subset> sets) {
  if (sets.empty()) throw EmptySetList("q0 needs at least one set");
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  for (Subset s : sets) {
    if (!is_subset(s, full_set(n))) throw SubsetOutOfRange("set " + format_subset(s) + " not within [" + std::to_string(n) + "]");
  }
  // A chain ordering exists iff the sets sorted by decreasing size are
  // successively nested; equal sizes in a chain force equal sets.
  std::vector<Subset> chain(sets.begin(), sets.end());
  std::stable_sort(chain.begin(), chain.end(), [](Subset x, Subset y) { return cardinality(x) > cardinality(y); });
  std::vector<int> sizes;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i > 0 && !is_subset(chain[i], chain[i - 1])) return Rational(0);
    sizes.push_back(cardinality(chain[i]));
  }
  return chain_coefficient(n, sizes);
}

std::map<std::vector<Subset>, Rational> q_multi_from_model(const PermutationModel<Rational>& model, int m) {
  if (m < 1) throw EmptySetList("need at least one system");
  const int n = model.n();
  std::map<std::vector<Subset>, Rational> table;
  std::vector<int> idx(m, 0);
  std::vector<Subset> tuple(m);
  for (const auto& [sigma, p] : model.probabilities()) {
    const auto suffix = suffix_sets(sigma);
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (int i = 0; i < m; ++i) tuple[i] = suffix[idx[i]];
      table[tuple] += p;
      int pos = 0;
      while (pos < m && ++idx[pos] > n) idx[pos++] = 0;
      if (pos == m) break;
    }
  }
  return table;
}

}  // namespace sigkit
