#include "palign/cluster_anneal.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>

#include "palign/errors.hpp"

namespace palign {
namespace {

// Stand-in reciprocal remainder bound when a candidate finishes the cover.
constexpr double kFinishingBonus = 1e6;

void validate(const AnnealConfig& c) {
  if (!(c.t0 > 0.0)) throw std::invalid_argument("anneal config: T0 must be positive");
  if (!(c.e > 0.0 && c.e < c.t0))
    throw std::invalid_argument("anneal config: need 0 < e < T0");
  if (!(c.beta > 0.0 && c.beta < 1.0))
    throw std::invalid_argument("anneal config: beta must lie in (0, 1)");
  if (!(c.gamma > 0.0 && c.gamma < 1.0))
    throw std::invalid_argument("anneal config: gamma must lie in (0, 1)");
  if (c.node_budget && *c.node_budget == 0)
    throw std::invalid_argument("anneal config: node budget must be positive");
}

}  // namespace

PathSignature SearchPath::signature() const {
  PathSignature sig;
  sig.reserve(steps.size());
  for (const auto& s : steps) sig.push_back(s.members);
  return sig;
}

const char* to_string(AnnealEvent event) {
  switch (event) {
    case AnnealEvent::Improve: return "improve";
    case AnnealEvent::Complete: return "complete";
    case AnnealEvent::Prune: return "prune";
    case AnnealEvent::Backtrack: return "backtrack";
  }
  return "unknown";
}

std::vector<double> potential(const SimilarityGraph& graph, FeasibilityOracle& oracle,
                              const SearchPath& path,
                              const std::vector<std::vector<int>>& candidates,
                              bool invert_diversity_term) {
  const std::size_t k = candidates.size();
  std::vector<double> first(k), second(k);

  double first_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double div = oracle.subset_diversity(candidates[i]);
    first[i] = invert_diversity_term ? (div == 0.0 ? kFinishingBonus : 1.0 / div) : div;
    first_sum += first[i];
  }

  double second_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<int> rest;
    std::set_difference(path.uncovered.begin(), path.uncovered.end(), candidates[i].begin(),
                        candidates[i].end(), std::back_inserter(rest));
    second[i] = rest.empty() ? kFinishingBonus : 1.0 / mis_lower_bound(graph, rest);
    second_sum += second[i];
  }

  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double share =
        first_sum == 0.0 ? 1.0 / static_cast<double>(k) : first[i] / first_sum;
    out[i] = share + second[i] / second_sum;
  }
  return out;
}

int choose_branch(const std::vector<double>& potentials, double t, Rng& rng) {
  if (potentials.empty()) throw std::invalid_argument("choose_branch: no candidates");
  if (!(t > 0.0)) throw std::invalid_argument("choose_branch: temperature must be positive");

  const double top = *std::max_element(potentials.begin(), potentials.end());
  std::vector<double> weight(potentials.size());
  double total = 0.0;
  for (std::size_t i = 0; i < potentials.size(); ++i) {
    weight[i] = std::exp((potentials[i] - top) / t);
    total += weight[i];
  }

  const double target = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    acc += weight[i];
    if (target < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weight.size()) - 1;  // rounding guard
}

SearchPath backtrack(SearchPath path, double global_temperature, double t0_scale, Rng& rng) {
  if (path.steps.empty()) throw EmptyPath("backtrack: nothing to revert");
  path.visited.insert(path.signature());

  const int len = static_cast<int>(path.steps.size());
  const double q = 1.0 / (1.0 + global_temperature / t0_scale);
  const double r = 1.0 - q;  // per-level survival; larger means deeper reversion
  const double u = uniform01(rng);
  int depth = 1;
  if (r > 0.0) {
    const double tail = 1.0 - std::pow(r, len);
    depth = static_cast<int>(std::ceil(std::log1p(-u * tail) / std::log(r)));
    depth = std::clamp(depth, 1, len);
  }

  for (int s = len - depth; s < len; ++s)
    path.uncovered.insert(path.uncovered.end(), path.steps[s].members.begin(),
                          path.steps[s].members.end());
  std::sort(path.uncovered.begin(), path.uncovered.end());
  path.steps.resize(static_cast<std::size_t>(len - depth));
  return path;
}

AnnealResult hbnb_min_clustering(const SimilarityGraph& graph, FeasibilityOracle& oracle,
                                 const AnnealConfig& config) {
  validate(config);
  const std::uint64_t calls_before = oracle.query_count();
  Rng rng(config.seed);

  const auto components = connected_components(graph);
  std::vector<std::vector<std::vector<int>>> bests;  // member lists per component
  bests.reserve(components.size());
  int total_best = 0;
  for (const auto& comp : components) {
    auto& best = bests.emplace_back();
    for (const int v : comp) best.push_back({v});
    total_best += static_cast<int>(comp.size());
  }

  AnnealResult out;
  out.partition.alpha = graph.alpha;
  out.partition.source = PartitionSource::HBnB;

  std::uint64_t nodes = 0;
  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    const auto& comp = components[ci];
    auto& best = bests[ci];
    const auto optimum = static_cast<std::size_t>(mis_lower_bound(graph, comp));

    double big_t = config.t0;
    double small_t = config.t0;
    SearchPath path;
    path.uncovered = comp;

    auto record = [&](AnnealEvent event) {
      out.log.records.push_back({nodes, total_best, big_t, small_t, event});
    };
    // Shared tail of every descent-ending branch: cool, reset, log, revert.
    auto end_descent = [&](AnnealEvent event) {
      big_t *= config.beta;
      small_t = big_t;
      record(event);
      if (!path.steps.empty()) path = backtrack(std::move(path), big_t, config.t0, rng);
    };

    while (big_t >= config.e && best.size() > optimum) {
      ++nodes;
      if (config.node_budget && nodes > *config.node_budget)
        throw BudgetExceeded("hbnb_min_clustering: node budget of " +
                             std::to_string(*config.node_budget) + " exhausted");

      if (path.uncovered.empty()) {
        AnnealEvent event = AnnealEvent::Complete;
        if (path.steps.size() < best.size()) {
          total_best -= static_cast<int>(best.size() - path.steps.size());
          best.clear();
          for (const auto& s : path.steps) best.push_back(s.members);
          event = AnnealEvent::Improve;
        }
        path.visited.insert(path.signature());
        end_descent(event);
        continue;
      }

      if (path.steps.size() + static_cast<std::size_t>(
                                  mis_lower_bound(graph, path.uncovered)) >= best.size()) {
        path.visited.insert(path.signature());
        end_descent(AnnealEvent::Prune);
        continue;
      }

      const int root = min_degree_vertex(graph, path.uncovered);
      PathSignature probe = path.signature();
      std::vector<std::vector<int>> viable;
      for (auto& cand : enumerate_maximal_clusters(graph, oracle, root, path.uncovered)) {
        probe.push_back(cand);
        if (!path.visited.count(probe)) viable.push_back(std::move(cand));
        probe.pop_back();
      }
      if (viable.empty()) {  // subtree exhausted; force a reversion
        path.visited.insert(path.signature());
        end_descent(AnnealEvent::Backtrack);
        continue;
      }

      const auto scores = potential(graph, oracle, path, viable, config.invert_diversity_term);
      const auto& chosen = viable[static_cast<std::size_t>(choose_branch(scores, small_t, rng))];
      std::vector<int> rest;
      std::set_difference(path.uncovered.begin(), path.uncovered.end(), chosen.begin(),
                          chosen.end(), std::back_inserter(rest));
      path.steps.push_back({root, chosen});
      path.uncovered = std::move(rest);
      small_t *= config.gamma;
    }
  }

  for (const auto& best : bests)
    for (const auto& members : best)
      out.partition.clusters.push_back(finalize_cluster(oracle, members, graph.alpha));
  std::sort(out.partition.clusters.begin(), out.partition.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });

  out.partition.stats.nodes_expanded = nodes;
  out.partition.stats.oracle_calls = oracle.query_count() - calls_before;
  return out;
}

Partition singleton_partition(const SimilarityGraph& graph, FeasibilityOracle& oracle) {
  const std::uint64_t calls_before = oracle.query_count();
  Partition out;
  out.alpha = graph.alpha;
  out.source = PartitionSource::Singletons;
  for (int v = 0; v < graph.size(); ++v)
    out.clusters.push_back(finalize_cluster(oracle, {v}, graph.alpha));
  out.stats.oracle_calls = oracle.query_count() - calls_before;
  return out;
}

}  // namespace palign
