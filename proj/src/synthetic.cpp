#include "sdgcl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "sdgcl/error.hpp"

namespace sdgcl {

SignedDiGraph make_synthetic_graph(const SyntheticSpec& spec) {
  if (spec.num_nodes < 2) throw InputError("synthetic graph needs at least two nodes");
  const auto max_edges = static_cast<std::size_t>(spec.num_nodes) * static_cast<std::size_t>(spec.num_nodes - 1);
  if (spec.num_edges > max_edges / 2) throw InputError("synthetic graph too dense for its node count");
  if (!(spec.positive_ratio > 0.0 && spec.positive_ratio < 1.0)) {
    throw InputError("positive ratio must lie in (0, 1)");
  }

  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<std::size_t>(spec.num_nodes);
  std::vector<double> quality(n), bias(n), activity(n);
  for (std::size_t i = 0; i < n; ++i) {
    quality[i] = normal(rng);
    bias[i] = normal(rng);
    activity[i] = std::pow(1.0 - unit(rng), -1.0 / 1.5);  // Pareto tail
  }
  std::discrete_distribution<std::size_t> endpoint(activity.begin(), activity.end());

  struct Candidate {
    Index src, dst;
    double score;
  };
  std::vector<Candidate> candidates;
  std::unordered_set<std::uint64_t> used;
  const auto key = [](std::size_t u, std::size_t v) { return (static_cast<std::uint64_t>(u) << 32) | v; };
  const auto score = [&](std::size_t u, std::size_t v) {
    return quality[v] + 0.5 * bias[u] + spec.noise * normal(rng);
  };
  std::size_t attempts = 0;
  while (candidates.size() < spec.num_edges && attempts++ < 50 * spec.num_edges + 1000) {
    const std::size_t u = endpoint(rng);
    const std::size_t v = endpoint(rng);
    if (u == v || !used.insert(key(u, v)).second) continue;
    candidates.push_back({static_cast<Index>(u), static_cast<Index>(v), score(u, v)});
    if (candidates.size() < spec.num_edges && unit(rng) < spec.reciprocity && used.insert(key(v, u)).second) {
      candidates.push_back({static_cast<Index>(v), static_cast<Index>(u), score(v, u)});
    }
  }

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) scores.push_back(c.score);
  const auto cut = static_cast<std::size_t>(std::floor((1.0 - spec.positive_ratio) * static_cast<double>(scores.size())));
  std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(cut), scores.end());
  const double threshold = scores.empty() ? 0.0 : scores[cut];

  std::vector<EdgeRecord> edges;
  edges.reserve(candidates.size());
  for (const auto& c : candidates) edges.push_back({c.src, c.dst, c.score >= threshold ? 1 : -1});
  return SignedDiGraph::from_edges(spec.num_nodes, edges);
}

}  // namespace sdgcl
