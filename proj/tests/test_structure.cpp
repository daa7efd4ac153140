#include <algorithm>
#include <memory>

#include "doctest.h"
#include "sigkit/errors.hpp"
#include "sigkit/structure.hpp"
#include "support.hpp"

using namespace sigkit;
using sigkit::test::Rng;

TEST_CASE("identity structure on one component") {
  const bool table[] = {false, true};
  const auto phi = StructureFunction::from_truth_table(1, table);
  CHECK(phi.n() == 1);
  CHECK_FALSE(phi(0));
  CHECK(phi(1));
}

TEST_CASE("monotonicity violation carries the witness pair") {
  // φ({1}) = 1 but φ({1,2}) = 0.
  try {
    StructureFunction::from_truth_table(2, "0110");
    FAIL("expected NotSemicoherent");
  } catch (const NotSemicoherent& e) {
    CHECK(e.smaller() == 0b01);
    CHECK(e.larger() == 0b11);
    CHECK_FALSE(e.is_boundary_failure());
  }
}

TEST_CASE("boundary violations") {
  try {
    StructureFunction::from_truth_table(2, "0000");
    FAIL("expected NotSemicoherent");
  } catch (const NotSemicoherent& e) {
    CHECK(e.is_boundary_failure());
    CHECK(e.smaller() == 0b11);
  }
  CHECK_THROWS_AS(StructureFunction::from_truth_table(2, "1111"), NotSemicoherent);
}

TEST_CASE("truth table size and limits") {
  CHECK_THROWS_AS(StructureFunction::from_truth_table(2, "001"), DimensionMismatch);
  CHECK_THROWS_AS(StructureFunction::from_truth_table(2, "00x1"), ParseError);
  CHECK_THROWS_AS(StructureFunction::k_out_of_n(25, 1), SizeLimitExceeded);
  CHECK_THROWS_AS(StructureFunction::k_out_of_n(0, 1), SizeLimitExceeded);
}

TEST_CASE("path set constructor") {
  SUBCASE("reference pair of systems") {
    const auto phi1 = test::pair_phi1();
    for (Subset a = 0; a < 16; ++a) CHECK(phi1(a) == ((a & 0b0011) == 0b0011));
    const auto phi2 = test::pair_phi2();
    for (Subset a = 0; a < 16; ++a) {
      const bool expected = (a & 0b1010) == 0b1010 || (a & 0b1100) == 0b1100;
      CHECK(phi2(a) == expected);
    }
  }
  SUBCASE("parallel system") {
    const auto phi = StructureFunction::from_min_path_sets(3, {{1}, {2}, {3}});
    for (Subset a = 0; a < 8; ++a) CHECK(phi(a) == (a != 0));
  }
  SUBCASE("duplicates and non-minimal paths are harmless") {
    const auto a = StructureFunction::from_min_path_sets(3, {{1, 2}, {2, 1}, {1, 2, 3}});
    const auto b = StructureFunction::from_min_path_sets(3, {{1, 2}});
    CHECK(a == b);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(StructureFunction::from_min_path_sets(3, {}), EmptyPathList);
    CHECK_THROWS_AS(StructureFunction::from_min_path_sets(3, {{}}), PathOutOfRange);
    CHECK_THROWS_AS(StructureFunction::from_min_path_sets(3, {{1, 4}}), PathOutOfRange);
    CHECK_THROWS_AS(StructureFunction::from_min_path_sets(3, {{0}}), PathOutOfRange);
  }
}

TEST_CASE("k-out-of-n") {
  const auto series = StructureFunction::k_out_of_n(3, 1);
  const auto parallel = StructureFunction::k_out_of_n(3, 3);
  const auto two = StructureFunction::k_out_of_n(3, 2);
  for (Subset a = 0; a < 8; ++a) {
    CHECK(series(a) == (a == 7));
    CHECK(parallel(a) == (a != 0));
    CHECK(two(a) == (cardinality(a) >= 2));
  }
  CHECK_THROWS_AS(StructureFunction::k_out_of_n(3, 0), OutOfRange);
  CHECK_THROWS_AS(StructureFunction::k_out_of_n(3, 4), OutOfRange);
}

TEST_CASE("system lifetime examples") {
  const LifetimeSample sample({0.5, 1.0, 0.2, 2.0});
  const auto f1 = system_lifetime(test::pair_phi1(), sample);
  CHECK(f1.lifetime == 0.5);
  CHECK(f1.rank == 2);
  const auto f2 = system_lifetime(test::pair_phi2(), sample);
  CHECK(f2.lifetime == 1.0);
  CHECK(f2.rank == 3);
  const auto f3 = system_lifetime(StructureFunction::k_out_of_n(2, 1), LifetimeSample({3.0, 1.0}));
  CHECK(f3.lifetime == 1.0);
  CHECK(f3.rank == 1);
  CHECK_THROWS_AS(system_lifetime(test::pair_phi1(), LifetimeSample({1.0, 2.0})), DimensionMismatch);
}

TEST_CASE("lifetime sample invariants") {
  CHECK_THROWS_AS(LifetimeSample({1.0, 1.0}), InputError);
  CHECK_THROWS_AS(LifetimeSample({1.0, 0.0}), InputError);
  CHECK_THROWS_AS(LifetimeSample({1.0, -2.0}), InputError);
  CHECK_THROWS_AS(LifetimeSample({}), InputError);
}

TEST_CASE("property: lifetime equals max over paths of min over path") {
  Rng rng(20260101);
  std::uniform_real_distribution<double> unit(0.01, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto paths = test::random_paths(n, rng);
    const auto phi = StructureFunction::from_truth_table(n, test::table_from_paths(n, paths));
    std::vector<double> times(n);
    for (auto& t : times) t = unit(rng);
    const LifetimeSample sample(times);
    double expected = 0.0;
    for (Subset p : paths) {
      double m = 1e300;
      for (int label : labels_of(p)) m = std::min(m, times[label - 1]);
      expected = std::max(expected, m);
    }
    const auto failure = system_lifetime(phi, sample);
    CHECK(failure.lifetime == expected);
    auto sorted = times;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[failure.rank - 1] == failure.lifetime);
  }
}

TEST_CASE("property: k-out-of-n fails at rank k") {
  Rng rng(7);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const int k = 1 + static_cast<int>(rng() % n);
    std::vector<double> times(n);
    for (auto& t : times) t = unit(rng);
    CHECK(system_lifetime(StructureFunction::k_out_of_n(n, k), LifetimeSample(times)).rank == k);
  }
}

TEST_CASE("property: minimal path extraction round-trips") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto phi = test::random_structure(n, rng);
    std::vector<std::vector<int>> paths;
    for (Subset p : phi.minimal_path_sets()) paths.push_back(labels_of(p));
    const auto again = StructureFunction::from_min_path_sets(n, paths);
    CHECK(again == phi);
    CHECK(again.minimal_path_sets() == phi.minimal_path_sets());
  }
}

TEST_CASE("property: validation accepts monotone tables and rejects one flipped bit") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto bits = test::table_from_paths(n, test::random_paths(n, rng));
    CHECK_NOTHROW(StructureFunction::from_truth_table(n, bits));
    // Switch one true, non-full set off. If a proper subset is true this
    // breaks monotonicity; if the set was a minimal path the table stays valid.
    std::vector<Subset> flippable;
    for (Subset a = 1; a + 1 < (Subset{1} << n); ++a) {
      if (bits[a] == '1') flippable.push_back(a);
    }
    if (flippable.empty()) continue;
    const Subset victim = flippable[rng() % flippable.size()];
    auto broken = bits;
    broken[victim] = '0';
    bool below_true = false;
    for_each_submask(victim, [&](Subset s) {
      if (s != victim && bits[s] == '1') below_true = true;
    });
    if (below_true) {
      CHECK_THROWS_AS(StructureFunction::from_truth_table(n, broken), NotSemicoherent);
    } else {
      CHECK_NOTHROW(StructureFunction::from_truth_table(n, broken));
    }
  }
}

TEST_CASE("bool-span and string constructors agree") {
  const int n = 3;
  auto table = std::make_unique<bool[]>(8);
  for (Subset a = 0; a < 8; ++a) table[a] = cardinality(a) >= 2;
  const auto a = StructureFunction::from_truth_table(n, std::span<const bool>(table.get(), 8));
  CHECK(a == StructureFunction::k_out_of_n(3, 2));
  CHECK(a.truth_table_string() == "00010111");
}
