#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "palign/cluster_exact.hpp"
#include "palign/errors.hpp"
#include "palign/rng.hpp"
#include "partition_support.hpp"
#include "support.hpp"

using namespace palign;
using namespace palign::testing;

namespace {

MatrixSet scalar_family(const std::vector<double>& args) {
  MatrixSet set;
  for (const double a : args) {
    CMatrix m(1, 1);
    m(0, 0) = std::polar(1.0, a);
    set.push_back(m);
  }
  return set;
}

Partition run_bnr(FeasibilityOracle& oracle, const BnrOptions& options = {}) {
  const SimilarityGraph graph = build_similarity_graph(oracle);
  return bnr_min_clustering(graph, oracle, options);
}

}  // namespace

TEST_CASE("two well separated scalar groups come back as two clusters") {
  MatrixSet set = scalar_family({0.0, 0.05, 1.4, 1.45});
  ScalarSectorOracle oracle(set, 0.1);
  const Partition part = run_bnr(oracle);

  REQUIRE(part.clusters.size() == 2);
  CHECK(part.clusters[0].members == std::vector<int>{0, 1});
  CHECK(part.clusters[1].members == std::vector<int>{2, 3});
  CHECK(part.source == PartitionSource::BnR);
  check_partition(part, oracle);
}

TEST_CASE("a tight scalar group collapses to one cluster") {
  MatrixSet set = scalar_family({-0.2, -0.1, 0.0, 0.1, 0.2});
  ScalarSectorOracle oracle(set, 0.5);
  const Partition part = run_bnr(oracle);
  REQUIRE(part.clusters.size() == 1);
  CHECK(part.clusters[0].members == std::vector<int>{0, 1, 2, 3, 4});
  check_partition(part, oracle);
}

TEST_CASE("spread scalars at a narrow band stay singletons") {
  MatrixSet set = scalar_family({-1.2, -0.4, 0.4, 1.2});
  ScalarSectorOracle oracle(set, 0.05);
  const Partition part = run_bnr(oracle);
  REQUIRE(part.clusters.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(part.clusters[i].members == std::vector<int>{i});
  check_partition(part, oracle);
}

TEST_CASE("branch search matches the exhaustive minimum on random scalar families") {
  Rng rng(2026);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(uniform_index(rng, 5));  // 4..8
    std::vector<double> args;
    for (int i = 0; i < n; ++i) args.push_back(uniform_in(rng, -1.4, 1.4));
    const double alpha = uniform_in(rng, 0.05, 0.7);

    MatrixSet set = scalar_family(args);
    ScalarSectorOracle oracle(set, alpha);
    const Partition part = run_bnr(oracle);
    check_partition(part, oracle);

    ScalarSectorOracle fresh(set, alpha);
    CHECK(static_cast<int>(part.clusters.size()) == reference_min_blocks(fresh));
  }
}

TEST_CASE("branch search and built-in brute force agree on a matrix family") {
  Rng rng(7);
  MatrixSet set;
  set.push_back(sectorial_with_phases(rng, {0.30, 0.10}));
  set.push_back(sectorial_with_phases(rng, {0.25, 0.05}));
  set.push_back(sectorial_with_phases(rng, {-0.9, -1.1}));
  set.push_back(sectorial_with_phases(rng, {1.3, 1.1}));

  LmiFeasibilityOracle oracle(set, 0.25);
  const Partition bnr = run_bnr(oracle);
  check_partition(bnr, oracle);

  LmiFeasibilityOracle fresh(set, 0.25);
  const Partition brute = brute_force_min_partition(fresh);
  check_partition(brute, fresh);
  CHECK(brute.source == PartitionSource::BruteForce);
  CHECK(bnr.clusters.size() == brute.clusters.size());
}

TEST_CASE("branch search is deterministic") {
  MatrixSet set = scalar_family({0.0, 0.3, 0.32, 0.6, -0.28, -0.05});
  ScalarSectorOracle a(set, 0.33);
  ScalarSectorOracle b(set, 0.33);
  const Partition pa = run_bnr(a);
  const Partition pb = run_bnr(b);
  REQUIRE(pa.clusters.size() == pb.clusters.size());
  for (std::size_t c = 0; c < pa.clusters.size(); ++c)
    CHECK(pa.clusters[c].members == pb.clusters[c].members);
  CHECK(pa.stats.nodes_expanded == pb.stats.nodes_expanded);
}

TEST_CASE("search statistics are populated") {
  MatrixSet set = scalar_family({0.0, 0.05, 1.4, 1.45});
  ScalarSectorOracle oracle(set, 0.1);
  const Partition part = run_bnr(oracle);
  CHECK(part.stats.nodes_expanded > 0);
  CHECK(part.stats.oracle_calls > 0);
}

TEST_CASE("an exhausted node budget raises the budget error") {
  MatrixSet set = scalar_family({0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
  ScalarSectorOracle oracle(set, 0.6);
  const SimilarityGraph graph = build_similarity_graph(oracle);
  BnrOptions options;
  options.node_budget = 1;
  CHECK_THROWS_AS(bnr_min_clustering(graph, oracle, options), BudgetExceeded);
}

TEST_CASE("brute force refuses oversized families") {
  std::vector<double> args(13, 0.0);
  MatrixSet set = scalar_family(args);
  ScalarSectorOracle oracle(set, 0.5);
  CHECK_THROWS_AS(brute_force_min_partition(oracle), TooLarge);
}

TEST_CASE("brute force matches the unpruned reference on random families") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(uniform_index(rng, 4));  // 4..7
    std::vector<double> args;
    for (int i = 0; i < n; ++i) args.push_back(uniform_in(rng, -1.4, 1.4));
    const double alpha = uniform_in(rng, 0.1, 0.6);

    MatrixSet set = scalar_family(args);
    ScalarSectorOracle oracle(set, alpha);
    const Partition part = brute_force_min_partition(oracle);
    check_partition(part, oracle);

    ScalarSectorOracle fresh(set, alpha);
    CHECK(static_cast<int>(part.clusters.size()) == reference_min_blocks(fresh));
  }
}

TEST_CASE("a cluster exchange that merges mergeable singletons shrinks the partition") {
  // 0 and 1 are close enough to share a cluster at alpha = 0.1 but the branch
  // search is bypassed: start from all singletons and swap in the pair.
  MatrixSet set = scalar_family({0.0, 0.15, 1.0});
  ScalarSectorOracle oracle(set, 0.1);

  Partition singles;
  singles.alpha = 0.1;
  singles.source = PartitionSource::Singletons;
  for (int i = 0; i < 3; ++i) singles.clusters.push_back(finalize_cluster(oracle, {i}, 0.1));

  const Partition swapped = swap_partition(singles, {{0}, {1}}, {{0, 1}}, oracle);
  REQUIRE(swapped.clusters.size() == 2);
  CHECK(swapped.clusters[0].members == std::vector<int>{0, 1});
  CHECK(swapped.clusters[1].members == std::vector<int>{2});
  check_partition(swapped, oracle);
}

TEST_CASE("a cluster exchange may absorb members of surviving clusters") {
  MatrixSet set = scalar_family({0.0, 0.1, 0.2, 1.2});
  ScalarSectorOracle oracle(set, 0.3);

  Partition base;
  base.alpha = 0.3;
  base.source = PartitionSource::Singletons;
  base.clusters.push_back(finalize_cluster(oracle, {0, 1}, 0.3));
  base.clusters.push_back(finalize_cluster(oracle, {2}, 0.3));
  base.clusters.push_back(finalize_cluster(oracle, {3}, 0.3));

  // Retire {2}; the replacement {1, 2} also grabs 1 out of the surviving
  // cluster {0, 1}, which must shrink to {0}.
  const Partition swapped = swap_partition(base, {{2}}, {{1, 2}}, oracle);
  REQUIRE(swapped.clusters.size() == 3);
  CHECK(swapped.clusters[0].members == std::vector<int>{0});
  CHECK(swapped.clusters[1].members == std::vector<int>{1, 2});
  CHECK(swapped.clusters[2].members == std::vector<int>{3});
  check_partition(swapped, oracle);
}

TEST_CASE("invalid cluster exchanges are rejected") {
  MatrixSet set = scalar_family({0.0, 0.15, 1.0, 1.1});
  ScalarSectorOracle oracle(set, 0.1);

  Partition base;
  base.alpha = 0.1;
  base.source = PartitionSource::Singletons;
  for (int i = 0; i < 4; ++i) base.clusters.push_back(finalize_cluster(oracle, {i}, 0.1));

  SUBCASE("retired cluster absent from the base") {
    CHECK_THROWS_AS(swap_partition(base, {{0, 1}}, {{0, 1}}, oracle), InvalidSwap);
  }
  SUBCASE("replacement has more clusters than were retired") {
    CHECK_THROWS_AS(swap_partition(base, {{0}}, {{0}, {1}}, oracle), InvalidSwap);
  }
  SUBCASE("replacement fails to cover a retired member") {
    CHECK_THROWS_AS(swap_partition(base, {{0}, {1}}, {{1}}, oracle), InvalidSwap);
  }
  SUBCASE("replacement clusters overlap") {
    CHECK_THROWS_AS(swap_partition(base, {{0}, {1}}, {{0, 1}, {1}}, oracle), InvalidSwap);
  }
  SUBCASE("replacement cluster infeasible at the band") {
    // 2 and 3 are 0.1 apart but centred 0.05 from each, fine; 0 and 2 are
    // a full radian apart and cannot share a band of half-width 0.1.
    CHECK_THROWS_AS(swap_partition(base, {{0}, {2}}, {{0, 2}}, oracle), InvalidSwap);
  }
}

TEST_CASE("finalize rejects members outside any feasible band") {
  MatrixSet set = scalar_family({0.0, 1.4});
  ScalarSectorOracle oracle(set, 0.1);
  CHECK_THROWS_AS(finalize_cluster(oracle, {0, 1}, 0.1), SolverFailure);
}
