#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "sdgcl/augment.hpp"
#include "sdgcl/error.hpp"
#include "support.hpp"

using namespace sdgcl;

namespace {

constexpr double pi = std::numbers::pi;

SignedDiGraph small_graph(Index pos, Index neg) {
  std::vector<EdgeRecord> edges;
  Index node = 0;
  for (Index i = 0; i < pos; ++i, node += 2) edges.push_back({node, node + 1, 1});
  for (Index i = 0; i < neg; ++i, node += 2) edges.push_back({node, node + 1, -1});
  return graph_from_edges(node, edges);
}

}  // namespace

TEST_CASE("perturb_signs") {
  Rng rng(1);
  const auto g = small_graph(4, 2);
  CHECK(perturb_signs(g, 0.0, rng) == g);

  const auto flipped = perturb_signs(g, 1.0, rng);
  CHECK(flipped.num_positive() == 2);
  CHECK(flipped.num_negative() == 4);
  for (const auto& e : g.edges()) CHECK(flipped.sign_of(e.src, e.dst) == -e.sign);
}

TEST_CASE("perturb_signs counts at Bitcoin-Alpha scale") {
  // 22650 positive and 1536 negative edges: floor(0.1 * .) = 2265 and 153 flips
  const auto g = small_graph(22650, 1536);
  Rng rng(2);
  const auto out = perturb_signs(g, 0.1, rng);
  std::size_t pos_to_neg = 0, neg_to_pos = 0;
  for (const auto& e : g.edges()) {
    const int s = *out.sign_of(e.src, e.dst);
    if (e.sign > 0 && s < 0) ++pos_to_neg;
    if (e.sign < 0 && s > 0) ++neg_to_pos;
  }
  CHECK(pos_to_neg == 2265);
  CHECK(neg_to_pos == 153);
  CHECK(out.num_edges() == g.num_edges());
}

TEST_CASE("perturb_directions") {
  Rng rng(3);
  const auto g = small_graph(3, 2);
  CHECK(perturb_directions(g, 0.0, rng) == g);

  const std::vector<EdgeRecord> one{{0, 1, 1}};
  const auto single = perturb_directions(graph_from_edges(2, one), 1.0, rng);
  CHECK(single.num_edges() == 1);
  CHECK(single.sign_of(1, 0) == 1);
  CHECK_FALSE(single.has_edge(0, 1));

  const std::vector<EdgeRecord> pair{{0, 1, 1}, {1, 0, 1}};
  bool saw_forward = false, saw_backward = false;
  for (int trial = 0; trial < 50; ++trial) {
    const auto out = perturb_directions(graph_from_edges(2, pair), 1.0, rng);
    REQUIRE(out.num_edges() == 1);
    saw_forward |= out.has_edge(0, 1);
    saw_backward |= out.has_edge(1, 0);
  }
  CHECK(saw_forward);
  CHECK(saw_backward);
}

TEST_CASE("perturbations preserve invariants on random graphs") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = sdgcl::testing::random_graph({30, 0.2, 0.8}, rng);
    const auto s = perturb_signs(g, 0.2, rng);
    CHECK(s.num_edges() == g.num_edges());

    const auto d = perturb_directions(g, 0.2, rng);
    // only reciprocal deletions shrink the edge count, each by one
    const std::size_t selected = static_cast<std::size_t>(std::floor(0.2 * g.num_edges()));
    CHECK(d.num_edges() <= g.num_edges());
    CHECK(g.num_edges() - d.num_edges() <= selected);
    // rebuilding through the validating constructor must succeed
    CHECK_NOTHROW(graph_from_edges(d.num_nodes(), d.edges()));
  }
}

TEST_CASE("sample_phase") {
  Rng rng(5);
  PerturbationConfig single;
  single.q_choices = {0.2 * pi};
  for (int i = 0; i < 100; ++i) CHECK(sample_phase(single, rng) == 0.2 * pi);

  PerturbationConfig grid;
  std::map<double, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample_phase(grid, rng)];
  CHECK(counts.size() == 5);
  for (const auto& [q, c] : counts) CHECK(std::abs(static_cast<double>(c) / draws - 0.2) <= 0.02);

  PerturbationConfig noisy;
  noisy.q_base = 0.1 * pi;
  noisy.q_noise_std = 10.0;
  for (int i = 0; i < 10000; ++i) {
    const double q = sample_phase(noisy, rng);
    CHECK(q >= 0.0);
    CHECK(q <= 0.5 * pi);
  }
}

TEST_CASE("reference_q") {
  PerturbationConfig c;
  CHECK(c.reference_q() == doctest::Approx(0.2 * pi));
  c.q_choices = {0.3 * pi};
  CHECK(c.reference_q() == 0.3 * pi);
  c.q_noise_std = 0.5;
  CHECK(c.reference_q() == c.q_base);
}

TEST_CASE("PerturbationConfig validation") {
  PerturbationConfig c;
  CHECK_NOTHROW(c.validate());
  c.sign_flip_ratio = 1.5;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = {};
  c.q_choices = {0.5 * pi};
  CHECK_THROWS_AS(c.validate(), InputError);
  c = {};
  c.q_noise_std = -1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = {};
  c.q_choices.clear();
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("make_views") {
  Rng rng(6);
  const auto g = sdgcl::testing::random_graph({40, 0.15, 0.8}, rng);

  PerturbationConfig off;
  off.sign_flip_ratio = off.direction_flip_ratio = 0.0;
  off.q_choices = {0.1 * pi};
  const auto [a, b] = make_views(g, off, rng);
  CHECK(a.graph == g);
  CHECK(b.graph == g);
  CHECK(a.q == b.q);

  PerturbationConfig on;
  int differing = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto [v1, v2] = make_views(g, on, rng);
    differing += !(v1.graph == v2.graph);
  }
  CHECK(differing == 20);

  Rng r1(99), r2(99);
  const auto x = make_views(g, on, r1);
  const auto y = make_views(g, on, r2);
  CHECK(x.first.graph == y.first.graph);
  CHECK(x.second.graph == y.second.graph);
  CHECK(x.first.q == y.first.q);
}
