#include "sigkit/signature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sigkit {

namespace {

void check_same_n(const StructureFunction& a, const StructureFunction& b) {
  if (a.n() != b.n()) {
    throw DimensionMismatch("systems have " + std::to_string(a.n()) + " and " + std::to_string(b.n()) + " components");
  }
}

/// In-place subset-sum (zeta) transform: f(S) <- Σ_{T ⊆ S} f(T).
template <class T>
void subset_sum(std::vector<T>& f, int n) {
  const std::size_t size = std::size_t{1} << n;
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t s = 0; s < size; ++s) {
      if (s & bit) f[s] += f[s ^ bit];
    }
  }
}

/// Number of pairs (Large, Small), Small ⊆ Large, |Small| = small_size,
/// outer(Large) = inner(Small) = 1, tallied by |Large| (only sizes
/// >= small_size, or > small_size when strict).
void count_nested(const StructureFunction& outer, const StructureFunction& inner, int small_size, bool strict,
                  std::vector<std::uint32_t>& buffer, std::vector<std::uint64_t>& by_large_size) {
  const int n = outer.n();
  const std::size_t size = std::size_t{1} << n;
  for (std::size_t s = 0; s < size; ++s) {
    const auto sub = static_cast<Subset>(s);
    buffer[s] = (cardinality(sub) == small_size && inner(sub)) ? 1u : 0u;
  }
  subset_sum(buffer, n);
  std::fill(by_large_size.begin(), by_large_size.end(), 0);
  for (std::size_t s = 0; s < size; ++s) {
    const auto large = static_cast<Subset>(s);
    const int c = cardinality(large);
    if (c < small_size || (strict && c == small_size) || !outer(large)) continue;
    by_large_size[c] += buffer[s];
  }
}

}  // namespace

Vector<Rational> structure_tail(const StructureFunction& phi) {
  const int n = phi.n();
  const auto counts = phi.true_counts_by_size();
  Vector<Rational> t(n + 1);
  for (int k = 0; k <= n; ++k) t(k) = Rational(mpz_class(counts[n - k]), binomial(n, n - k));
  return t;
}

Vector<Rational> boland_signature(const StructureFunction& phi) { return signature_from_tail(structure_tail(phi)); }

Matrix<Rational> joint_structure_tail(const StructureFunction& phi1, const StructureFunction& phi2, Parallelism par) {
  check_same_n(phi1, phi2);
  const int n = phi1.n();
  const auto sizes1 = phi1.true_counts_by_size();
  const auto sizes2 = phi2.true_counts_by_size();

  // pairs[a][b] = #{(A, B) nested : |A| = a, |B| = b, φ₁(A) = φ₂(B) = 1}.
  // Task c < n+1 counts B ⊆ A with |B| = c; task c > n counts A ⊊ B with
  // |A| = c - (n+1). Each task owns its own row/column, so the total is
  // independent of scheduling.
  std::vector<std::vector<std::uint64_t>> pairs(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  const std::size_t tasks = 2 * static_cast<std::size_t>(n + 1);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(par.threads, tasks));
  std::vector<std::vector<std::uint32_t>> buffers(workers);
  std::vector<std::vector<std::vector<std::uint64_t>>> tallies(tasks);

  parallel_for(tasks, par, [&](std::size_t task, std::size_t worker) {
    const bool small_is_b = task <= static_cast<std::size_t>(n);
    const int c = static_cast<int>(small_is_b ? task : task - (n + 1));
    if ((small_is_b ? sizes2[c] : sizes1[c]) == 0) return;
    auto& buffer = buffers[worker];
    buffer.resize(std::size_t{1} << n);
    std::vector<std::uint64_t> by_size(n + 1, 0);
    if (small_is_b) {
      count_nested(phi1, phi2, c, false, buffer, by_size);
    } else {
      count_nested(phi2, phi1, c, true, buffer, by_size);
    }
    tallies[task] = {std::move(by_size)};
  });
  for (std::size_t task = 0; task < tasks; ++task) {
    if (tallies[task].empty()) continue;
    const bool small_is_b = task <= static_cast<std::size_t>(n);
    const int c = static_cast<int>(small_is_b ? task : task - (n + 1));
    for (int large = 0; large <= n; ++large) {
      if (small_is_b) {
        pairs[large][c] += tallies[task][0][large];
      } else {
        pairs[c][large] += tallies[task][0][large];
      }
    }
  }

  Matrix<Rational> t = Matrix<Rational>::Zero(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n; ++b) {
      if (pairs[a][b] == 0) continue;
      const int sizes[] = {std::max(a, b), std::min(a, b)};
      t(n - a, n - b) = chain_coefficient(n, sizes) * Rational(mpz_class(static_cast<unsigned long>(pairs[a][b])));
    }
  }
  validate_joint_tail(t);
  return t;
}

Matrix<Rational> joint_structure_signature(const StructureFunction& phi1, const StructureFunction& phi2,
                                           Parallelism par) {
  return joint_from_tail(joint_structure_tail(phi1, phi2, par));
}

MultiTail::MultiTail(int n, int m) : n_(n), m_(m) {
  if (m < 1) throw EmptySetList("need at least one system");
  std::size_t cells = 1;
  for (int i = 0; i < m; ++i) {
    cells *= static_cast<std::size_t>(n + 1);
    if (cells > kMultiCellBudget) {
      throw SizeLimitExceeded("(n+1)^m = " + std::to_string(n + 1) + "^" + std::to_string(m) + " exceeds budget of " +
                              std::to_string(kMultiCellBudget) + " cells");
    }
  }
  data_.assign(cells, Rational(0));
}

std::size_t MultiTail::offset(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != m_) throw DimensionMismatch("multi-index has wrong arity");
  std::size_t off = 0;
  for (int k : index) {
    if (k < 0 || k > n_) throw OutOfRange("multi-index entry out of range");
    off = off * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(k);
  }
  return off;
}

std::vector<int> MultiTail::index_of(std::size_t i) const {
  std::vector<int> index(m_);
  for (int d = m_ - 1; d >= 0; --d) {
    index[d] = static_cast<int>(i % static_cast<std::size_t>(n_ + 1));
    i /= static_cast<std::size_t>(n_ + 1);
  }
  return index;
}

namespace {

int check_family(std::span<const StructureFunction> phis) {
  if (phis.empty()) throw EmptySetList("need at least one system");
  for (const auto& phi : phis) check_same_n(phis.front(), phi);
  return phis.front().n();
}

}  // namespace

MultiTail multi_tail_uniform(std::span<const StructureFunction> phis, Parallelism par) {
  const int n = check_family(phis);
  const int m = static_cast<int>(phis.size());
  // Chain counts are bounded by (m+1)^n and are kept in 64 bits; the
  // per-cell transform touches 2^n sets.
  if (n * std::log2(m + 1.0) > 62.0 || n > 16) {
    throw SizeLimitExceeded("m = " + std::to_string(m) + " systems on n = " + std::to_string(n) +
                            " components exceeds the uniform multi-tail budget");
  }
  MultiTail out(n, m);
  std::vector<std::vector<std::uint64_t>> sizes;
  for (const auto& phi : phis) sizes.push_back(phi.true_counts_by_size());

  const std::size_t size = std::size_t{1} << n;
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(par.threads, out.size()));
  std::vector<std::vector<std::uint64_t>> buffers(workers);
  std::vector<std::uint64_t> counts(out.size(), 0);

  parallel_for(out.size(), par, [&](std::size_t cell, std::size_t worker) {
    const auto index = out.index_of(cell);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < m; ++i) {
      if (sizes[i][n - index[i]] == 0) return;
    }
    // Largest set first; the chain runs A_order[0] ⊇ A_order[1] ⊇ ...
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return index[x] < index[y]; });
    auto& h = buffers[worker];
    h.assign(size, 0);
    const auto weight = [&](int sys, Subset s) {
      return cardinality(s) == n - index[sys] && phis[sys](s);
    };
    for (std::size_t s = 0; s < size; ++s) h[s] = weight(order[m - 1], static_cast<Subset>(s)) ? 1 : 0;
    for (int j = m - 2; j >= 0; --j) {
      subset_sum(h, n);
      for (std::size_t s = 0; s < size; ++s) {
        if (!weight(order[j], static_cast<Subset>(s))) h[s] = 0;
      }
    }
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < size; ++s) total += h[s];
    counts[cell] = total;
  });

  for (std::size_t cell = 0; cell < out.size(); ++cell) {
    if (counts[cell] == 0) continue;
    auto index = out.index_of(cell);
    std::vector<int> chain_sizes;
    for (int k : index) chain_sizes.push_back(n - k);
    std::sort(chain_sizes.begin(), chain_sizes.end(), std::greater<>());
    out.flat(cell) = chain_coefficient(n, chain_sizes) * Rational(mpz_class(static_cast<unsigned long>(counts[cell])));
  }
  return out;
}

MultiTail multi_tail(std::span<const StructureFunction> phis, const PermutationModel<Rational>& model) {
  const int n = check_family(phis);
  if (model.n() != n) throw DimensionMismatch("model and systems differ in n");
  const int m = static_cast<int>(phis.size());
  MultiTail out(n, m);
  std::vector<int> index(m);
  for (const auto& [sets, p] : q_multi_from_model(model, m)) {
    bool alive = true;
    for (int i = 0; i < m && alive; ++i) {
      alive = phis[i](sets[i]);
      index[i] = n - cardinality(sets[i]);
    }
    if (alive) out.at(index) += p;
  }
  return out;
}

}  // namespace sigkit
