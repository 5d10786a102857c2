#pragma once

#include "sdgcl/graph.hpp"

namespace sdgcl {

/// Planted-signal signed directed graph for smoke tests and demos.
///
/// Each node has a latent quality and a rating bias; endpoints are drawn with
/// heavy-tailed activity weights, and an edge u->v is positive when
/// quality(v) + 0.5 bias(u) + noise clears the quantile that yields positive_ratio.
struct SyntheticSpec {
  Index num_nodes = 300;
  std::size_t num_edges = 3000;
  double positive_ratio = 0.9;
  double reciprocity = 0.1;  // probability of also adding the reverse edge
  double noise = 0.5;
  std::uint64_t seed = 0;
};

SignedDiGraph make_synthetic_graph(const SyntheticSpec& spec);

}  // namespace sdgcl
