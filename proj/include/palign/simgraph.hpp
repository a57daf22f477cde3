#pragma once

#include <vector>

#include "palign/alignment.hpp"
#include "palign/types.hpp"

namespace palign {

// Pairwise alignability structure of a matrix family at a fixed band alpha.
// weights(i, j) = pi/2 - diversity({i, j}) when the pair is alignable at
// alpha, and 0 otherwise; the matrix is symmetric with a zero diagonal, and
// an entry is positive exactly when the pair is alignable.
struct SimilarityGraph {
  double alpha = 0.0;
  RMatrix weights;

  int size() const { return static_cast<int>(weights.rows()); }
  bool edge(int i, int j) const { return weights(i, j) > 0.0; }
};

// A cluster of family indices (sorted ascending) with its alignment witness.
struct Cluster {
  std::vector<int> members;
  AlignmentCertificate certificate;
};

// Evaluates all pairs through the oracle; `jobs` > 1 splits the pair list
// across threads (the result does not depend on the split).
SimilarityGraph build_similarity_graph(FeasibilityOracle& oracle, int jobs = 1);

// Connected components over positive-weight edges, each sorted ascending,
// ordered by smallest member.  Isolated vertices form singleton components.
std::vector<std::vector<int>> connected_components(const SimilarityGraph& graph);

// All inclusion-maximal oracle-feasible subsets of `uncovered` that contain
// `root`, in lexicographic order.  Feasible subsets are closed downward, so
// depth-first extension with memoization visits each feasible superset of
// {root} at most once.
std::vector<std::vector<int>> enumerate_maximal_clusters(const SimilarityGraph& graph,
                                                         FeasibilityOracle& oracle, int root,
                                                         const std::vector<int>& uncovered);

// Size of an independent set in the subgraph induced by `vertices`, found by
// reducing-peeling: take degree-0 vertices, take degree-1 vertices (removing
// their neighbor), otherwise peel a maximum-degree vertex.  A valid lower
// bound on the maximum independent set, hence on the cluster count of any
// partition of `vertices` into alignable clusters.
int mis_lower_bound(const SimilarityGraph& graph, const std::vector<int>& vertices);

// Vertex of minimum degree within the subgraph induced by `among` (smallest
// index on ties).  The standard branching root: few neighbors means few
// clusters to try.
int min_degree_vertex(const SimilarityGraph& graph, const std::vector<int>& among);

}  // namespace palign
