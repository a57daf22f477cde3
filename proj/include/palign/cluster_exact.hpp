#pragma once

#include <cstdint>
#include <vector>

#include "palign/simgraph.hpp"

namespace palign {

enum class PartitionSource { Singletons, BnR, HBnB, BruteForce };

struct SearchStats {
  std::uint64_t nodes_expanded = 0;
  std::uint64_t oracle_calls = 0;
};

// Partition of the whole family into alignable clusters.  Invariants: member
// lists are disjoint, their union is {0, ..., family_size - 1}, every cluster
// certificate verifies against the family at `alpha`, and clusters are sorted
// by smallest member.
struct Partition {
  double alpha = 0.0;
  std::vector<Cluster> clusters;
  PartitionSource source = PartitionSource::Singletons;
  SearchStats stats;

  int size() const { return static_cast<int>(clusters.size()); }
};

struct BnrOptions {
  std::uint64_t node_budget = 10'000'000;
};

// Cluster with a certificate recomputed at `alpha`: the oracle's cached factor
// is re-verified from scratch, and re-solved if the cached witness does not
// carry over.  Throws SolverFailure when the members cannot be certified.
Cluster finalize_cluster(FeasibilityOracle& oracle, const std::vector<int>& members,
                         double alpha);

// Exact branch-and-reduce minimum clustering.  Works per connected component;
// branches over all maximal clusters containing a minimum-degree root, prunes
// with the independent-set lower bound, and keeps the best complete partition.
// Throws BudgetExceeded past options.node_budget expanded nodes.
Partition bnr_min_clustering(const SimilarityGraph& graph, FeasibilityOracle& oracle,
                             const BnrOptions& options = {});

// Reference optimum: enumerates set partitions in nondecreasing block count
// (restricted growth strings) with feasibility pruning on partial blocks and
// returns the first fully feasible partition.  Guarded to families of at most
// `max_size` members (throws TooLarge).
Partition brute_force_min_partition(FeasibilityOracle& oracle, int max_size = 12);

// Cluster exchange: removes the clusters `retired` from `base`, deletes the
// members of union(replacement) \ union(retired) from the surviving clusters,
// and appends `replacement`.  Preconditions (else InvalidSwap): every retired
// cluster appears in base, replacement clusters are pairwise disjoint and
// oracle-feasible, union(retired) is contained in union(replacement), and
// |replacement| <= |retired|.  The result never has more clusters than base.
Partition swap_partition(const Partition& base, const std::vector<std::vector<int>>& retired,
                         const std::vector<std::vector<int>>& replacement,
                         FeasibilityOracle& oracle);

}  // namespace palign
