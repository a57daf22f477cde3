#include "palign/cluster_exact.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <set>
#include <string>

#include "palign/errors.hpp"

namespace palign {
namespace {

std::vector<int> sorted_copy(const std::vector<int>& v) {
  std::vector<int> out = v;
  std::sort(out.begin(), out.end());
  return out;
}

MatrixSet subset_of(const MatrixSet& family, const std::vector<int>& members) {
  MatrixSet sub;
  sub.reserve(members.size());
  for (const int i : members) sub.push_back(family[static_cast<std::size_t>(i)]);
  return sub;
}

void sort_clusters(std::vector<Cluster>& clusters) {
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });
}

// Deterministic branch order: larger clusters first (better pruning), then
// lexicographic.
std::vector<std::vector<int>> branch_order(std::vector<std::vector<int>> clusters) {
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return clusters;
}

struct ComponentSearch {
  const SimilarityGraph& graph;
  FeasibilityOracle& oracle;
  std::uint64_t budget;
  std::uint64_t& nodes;

  std::vector<std::vector<int>> best;
  std::vector<std::vector<int>> current;

  void run(const std::vector<int>& uncovered) {
    if (++nodes > budget)
      throw BudgetExceeded("bnr_min_clustering: node budget of " + std::to_string(budget) +
                           " exhausted");
    if (uncovered.empty()) {
      if (current.size() < best.size()) best = current;
      return;
    }
    if (current.size() + mis_lower_bound(graph, uncovered) >= best.size()) return;

    const int root = min_degree_vertex(graph, uncovered);
    for (const auto& cluster :
         branch_order(enumerate_maximal_clusters(graph, oracle, root, uncovered))) {
      std::vector<int> rest;
      rest.reserve(uncovered.size() - cluster.size());
      std::set_difference(uncovered.begin(), uncovered.end(), cluster.begin(), cluster.end(),
                          std::back_inserter(rest));
      current.push_back(cluster);
      run(rest);
      current.pop_back();
    }
  }
};

}  // namespace

Cluster finalize_cluster(FeasibilityOracle& oracle, const std::vector<int>& members,
                         double alpha) {
  const std::vector<int> sorted = sorted_copy(members);
  const MatrixSet sub = subset_of(oracle.family(), sorted);

  auto cached = oracle.feasible(sorted);
  if (cached) {
    if (auto rebound = certify_with(sub, cached->k, alpha))
      return Cluster{sorted, std::move(*rebound)};
  }
  if (auto fresh = align_feasibility(sub, alpha)) return Cluster{sorted, std::move(*fresh)};
  throw SolverFailure("finalize_cluster: members could not be certified at the partition band");
}

Partition bnr_min_clustering(const SimilarityGraph& graph, FeasibilityOracle& oracle,
                             const BnrOptions& options) {
  const std::uint64_t calls_before = oracle.query_count();
  Partition out;
  out.alpha = graph.alpha;
  out.source = PartitionSource::BnR;

  std::uint64_t nodes = 0;
  for (const auto& comp : connected_components(graph)) {
    ComponentSearch search{graph, oracle, options.node_budget, nodes, {}, {}};
    for (const int v : comp) search.best.push_back({v});  // singletons as initial best
    if (comp.size() > 1) search.run(comp);
    for (const auto& members : search.best)
      out.clusters.push_back(finalize_cluster(oracle, members, out.alpha));
  }

  sort_clusters(out.clusters);
  out.stats.nodes_expanded = nodes;
  out.stats.oracle_calls = oracle.query_count() - calls_before;
  return out;
}

Partition brute_force_min_partition(FeasibilityOracle& oracle, int max_size) {
  const int n = oracle.family_size();
  if (n > max_size)
    throw TooLarge("brute_force_min_partition: family of " + std::to_string(n) +
                   " exceeds the guard of " + std::to_string(max_size));
  const std::uint64_t calls_before = oracle.query_count();

  std::vector<std::vector<int>> blocks;
  std::vector<std::vector<int>> found;

  // Restricted growth: item i may join an existing block or open block
  // |blocks| while fewer than p blocks exist.  Partial blocks are checked as
  // they grow; feasibility is closed downward, so pruning is safe.
  auto assign = [&](const auto& self, int item, int p) -> bool {
    if (item == n) {
      if (static_cast<int>(blocks.size()) != p) return false;
      found = blocks;
      return true;
    }
    if (n - item < p - static_cast<int>(blocks.size())) return false;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].push_back(item);
      if (oracle.feasible(blocks[b]) && self(self, item + 1, p)) return true;
      blocks[b].pop_back();
    }
    if (static_cast<int>(blocks.size()) < p) {
      blocks.push_back({item});
      if (self(self, item + 1, p)) return true;
      blocks.pop_back();
    }
    return false;
  };

  for (int p = 1; p <= n; ++p) {
    blocks.clear();
    if (assign(assign, 0, p)) break;
  }

  Partition out;
  out.alpha = oracle.alpha();
  out.source = PartitionSource::BruteForce;
  for (const auto& members : found)
    out.clusters.push_back(finalize_cluster(oracle, members, out.alpha));
  sort_clusters(out.clusters);
  out.stats.oracle_calls = oracle.query_count() - calls_before;
  return out;
}

Partition swap_partition(const Partition& base, const std::vector<std::vector<int>>& retired,
                         const std::vector<std::vector<int>>& replacement,
                         FeasibilityOracle& oracle) {
  // Locate the retired clusters inside the base partition.
  std::set<std::size_t> retired_pos;
  for (const auto& r : retired) {
    const std::vector<int> key = sorted_copy(r);
    bool located = false;
    for (std::size_t c = 0; c < base.clusters.size(); ++c) {
      if (retired_pos.count(c)) continue;
      if (base.clusters[c].members == key) {
        retired_pos.insert(c);
        located = true;
        break;
      }
    }
    if (!located) throw InvalidSwap("swap_partition: retired cluster not present in base");
  }
  if (replacement.size() > retired.size())
    throw InvalidSwap("swap_partition: more replacement clusters than retired ones");

  std::set<int> covered_u;
  for (const auto& r : retired)
    for (const int v : r) covered_u.insert(v);
  std::set<int> covered_q;
  for (const auto& y : replacement)
    for (const int v : y) {
      if (!covered_q.insert(v).second)
        throw InvalidSwap("swap_partition: replacement clusters overlap");
    }
  for (const int v : covered_u)
    if (!covered_q.count(v))
      throw InvalidSwap("swap_partition: replacement does not cover the retired members");
  for (const auto& y : replacement)
    if (!oracle.feasible(sorted_copy(y)))
      throw InvalidSwap("swap_partition: replacement cluster not oracle-feasible");

  Partition out;
  out.alpha = base.alpha;
  out.source = base.source;
  for (std::size_t c = 0; c < base.clusters.size(); ++c) {
    if (retired_pos.count(c)) continue;
    std::vector<int> members;
    for (const int v : base.clusters[c].members)
      if (!covered_q.count(v)) members.push_back(v);  // drop Q \ U overlap
    if (members.empty()) continue;
    out.clusters.push_back(finalize_cluster(oracle, members, out.alpha));
  }
  for (const auto& y : replacement)
    out.clusters.push_back(finalize_cluster(oracle, sorted_copy(y), out.alpha));

  if (out.clusters.size() > base.clusters.size())
    throw InvalidSwap("swap_partition: exchange would grow the partition");
  sort_clusters(out.clusters);
  return out;
}

}  // namespace palign
