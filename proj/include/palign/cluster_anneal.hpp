#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "palign/cluster_exact.hpp"
#include "palign/rng.hpp"
#include "palign/simgraph.hpp"

namespace palign {

// Dual-temperature annealing schedule.  The global temperature T governs
// backtracking depth and termination; the branch temperature t flattens or
// sharpens the softmax over candidate clusters and is reset to T whenever a
// descent ends.
struct AnnealConfig {
  double t0 = 100.0;  // initial global temperature, > 0
  double beta = 0.9;  // global cooling factor, in (0, 1)
  double gamma = 0.9; // branch cooling factor, in (0, 1)
  double e = 1e-5;    // stop once T drops below this, in (0, t0)
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> node_budget;
  // Score branches by reciprocal diversity instead of diversity.  The
  // default keeps the additive form below; this switch is an experiment knob
  // for the opposite reading of "branch quality".
  bool invert_diversity_term = false;
};

// A traversed path is identified by its ordered sequence of chosen clusters.
using PathSignature = std::vector<std::vector<int>>;

struct PathStep {
  int root = 0;
  std::vector<int> members;  // sorted ascending
};

// Partial solution: pairwise disjoint clusters along `steps`, the vertices
// they do not yet cover, and signatures of abandoned paths that must never be
// rebuilt.
struct SearchPath {
  std::vector<PathStep> steps;
  std::vector<int> uncovered;  // sorted ascending
  std::set<PathSignature> visited;

  PathSignature signature() const;
};

enum class AnnealEvent { Improve, Complete, Prune, Backtrack };

const char* to_string(AnnealEvent event);

struct ConvergenceRecord {
  std::uint64_t iteration = 0;  // search node index at which the event fired
  int best_count = 0;           // best total cluster count at that moment
  double global_temperature = 0.0;
  double branch_temperature = 0.0;
  AnnealEvent event = AnnealEvent::Complete;
};

// The descent trace: one record per completed, improved, pruned, or
// force-abandoned path.  best_count is nonincreasing over the records.
struct ConvergenceLog {
  std::vector<ConvergenceRecord> records;
};

// Branching potential of each candidate cluster at the current root: the
// candidate's share of total cluster diversity plus its share of the
// reciprocal remainder lower bounds.  Degeneracies: a zero diversity sum
// spreads the first term uniformly, and an empty remainder counts as a
// reciprocal bound of 1e6 so finishing moves dominate.
std::vector<double> potential(const SimilarityGraph& graph, FeasibilityOracle& oracle,
                              const SearchPath& path,
                              const std::vector<std::vector<int>>& candidates,
                              bool invert_diversity_term = false);

// Samples an index with probability proportional to exp(p_i / t), computed
// max-subtracted so large potentials cannot overflow.  Consumes exactly one
// draw from `rng`.
int choose_branch(const std::vector<double>& potentials, double t, Rng& rng);

// Records the abandoned path's signature, then reverts d trailing steps where
// d is truncated-geometric on {1, ..., len} with success probability
// 1 / (1 + T / t0_scale): a hotter search reverts deeper.  Consumes exactly
// one draw.  Throws EmptyPath when there is nothing to revert.
SearchPath backtrack(SearchPath path, double global_temperature, double t0_scale, Rng& rng);

struct AnnealResult {
  Partition partition;
  ConvergenceLog log;
};

// Heated branch-and-bound.  Per connected component: annealed descents with
// lower-bound pruning, softmax branch choice among the maximal clusters at a
// minimum-degree root, and temperature-regulated backtracking, starting from
// the all-singletons solution.  A component stops once T falls below e or its
// best count reaches the independent-set lower bound (provably optimal).
AnnealResult hbnb_min_clustering(const SimilarityGraph& graph, FeasibilityOracle& oracle,
                                 const AnnealConfig& config = {});

// One certified cluster per vertex; the worst-case initial solution.
Partition singleton_partition(const SimilarityGraph& graph, FeasibilityOracle& oracle);

}  // namespace palign
