#include "palign/simgraph.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <set>
#include <thread>

#include "palign/errors.hpp"

namespace palign {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SimilarityGraph build_similarity_graph(FeasibilityOracle& oracle, int jobs) {
  const int n = oracle.family_size();
  SimilarityGraph g;
  g.alpha = oracle.alpha();
  g.weights = RMatrix::Zero(n, n);

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  auto evaluate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto [i, j] = pairs[p];
      const std::vector<int> pair{i, j};
      if (!oracle.feasible(pair)) continue;
      const double w = kPi / 2.0 - oracle.subset_diversity(pair);
      g.weights(i, j) = w;
      g.weights(j, i) = w;
    }
  };

  const int want = std::max(1, jobs);
  if (want == 1 || pairs.size() < 2) {
    evaluate(0, pairs.size());
    return g;
  }
  const std::size_t workers = std::min<std::size_t>(want, pairs.size());
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (pairs.size() + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(pairs.size(), begin + chunk);
    if (begin >= end) break;
    threads.emplace_back(evaluate, begin, end);
  }
  for (auto& t : threads) t.join();
  return g;
}

std::vector<std::vector<int>> connected_components(const SimilarityGraph& graph) {
  const int n = graph.size();
  std::vector<std::vector<int>> components;
  std::vector<char> seen(n, 0);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<int> comp{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      const int v = comp[head];
      for (int u = 0; u < n; ++u)
        if (!seen[u] && graph.edge(v, u)) {
          seen[u] = 1;
          comp.push_back(u);
        }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

std::vector<std::vector<int>> enumerate_maximal_clusters(const SimilarityGraph& graph,
                                                         FeasibilityOracle& oracle, int root,
                                                         const std::vector<int>& uncovered) {
  if (std::find(uncovered.begin(), uncovered.end(), root) == uncovered.end())
    throw std::invalid_argument("enumerate_maximal_clusters: root not in uncovered set");
  if (!oracle.feasible({root})) return {};

  std::set<std::vector<int>> visited;
  std::set<std::vector<int>> results;

  std::vector<int> pool = uncovered;
  std::sort(pool.begin(), pool.end());

  auto extend = [&](const auto& self, const std::vector<int>& current) -> void {
    if (!visited.insert(current).second) return;
    bool maximal = true;
    for (const int v : pool) {
      if (std::binary_search(current.begin(), current.end(), v)) continue;
      bool linked = true;
      for (const int u : current)
        if (!graph.edge(u, v)) {
          linked = false;
          break;
        }
      if (!linked) continue;
      std::vector<int> next = current;
      next.insert(std::upper_bound(next.begin(), next.end(), v), v);
      if (!oracle.feasible(next)) continue;
      maximal = false;
      self(self, next);
    }
    if (maximal) results.insert(current);
  };
  extend(extend, {root});

  return {results.begin(), results.end()};
}

int mis_lower_bound(const SimilarityGraph& graph, const std::vector<int>& vertices) {
  std::vector<int> verts = vertices;
  std::sort(verts.begin(), verts.end());
  const int k = static_cast<int>(verts.size());
  std::vector<char> alive(k, 1);
  std::vector<int> deg(k, 0);
  auto adjacent = [&](int a, int b) { return graph.edge(verts[a], verts[b]); };
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (adjacent(a, b)) {
        ++deg[a];
        ++deg[b];
      }

  auto remove = [&](int a) {
    alive[a] = 0;
    for (int b = 0; b < k; ++b)
      if (alive[b] && adjacent(a, b)) --deg[b];
  };

  int taken = 0;
  int remaining = k;
  while (remaining > 0) {
    int zero = -1, one = -1, peak = -1;
    for (int a = 0; a < k; ++a) {
      if (!alive[a]) continue;
      if (deg[a] == 0 && zero < 0) zero = a;
      if (deg[a] == 1 && one < 0) one = a;
      if (peak < 0 || deg[a] > deg[peak]) peak = a;
    }
    if (zero >= 0) {
      ++taken;
      remove(zero);
      --remaining;
    } else if (one >= 0) {
      ++taken;
      int nb = -1;
      for (int b = 0; b < k && nb < 0; ++b)
        if (alive[b] && b != one && adjacent(one, b)) nb = b;
      remove(one);
      remove(nb);
      remaining -= 2;
    } else {
      remove(peak);
      --remaining;
    }
  }
  return taken;
}

int min_degree_vertex(const SimilarityGraph& graph, const std::vector<int>& among) {
  int best = among.front();
  int best_deg = std::numeric_limits<int>::max();
  for (const int v : among) {
    int deg = 0;
    for (const int u : among)
      if (u != v && graph.edge(u, v)) ++deg;
    if (deg < best_deg || (deg == best_deg && v < best)) {
      best_deg = deg;
      best = v;
    }
  }
  return best;
}

}  // namespace palign
