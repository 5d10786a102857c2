#include "sdgcl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

void check_ratio(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw InputError(std::string(name) + " must lie in [0, 1]");
}

// k distinct indices out of [0, n), uniformly, via partial Fisher-Yates.
std::vector<std::size_t> choose(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

std::size_t floor_count(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
}

}  // namespace

void PerturbationConfig::validate() const {
  check_ratio(sign_flip_ratio, "sign flip ratio p");
  check_ratio(direction_flip_ratio, "direction flip ratio r");
  if (!(q_noise_std >= 0.0)) throw InputError("q noise std must be non-negative");
  if (q_noise_std == 0.0 && q_choices.empty()) throw InputError("q choices must not be empty");
  for (double q : q_choices) {
    if (!(q >= 0.0 && q < kHalfPi)) throw InputError("every q choice must lie in [0, pi/2)");
  }
  if (!(q_base >= 0.0 && q_base <= kHalfPi)) throw InputError("q base must lie in [0, pi/2]");
}

double PerturbationConfig::reference_q() const {
  if (q_noise_std > 0.0 || q_choices.empty()) return q_base;
  auto sorted = q_choices;
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() - 1) / 2];
}

SignedDiGraph perturb_signs(const SignedDiGraph& g, double p, Rng& rng) {
  check_ratio(p, "sign flip ratio p");
  std::vector<EdgeRecord> edges = g.edges();
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < edges.size(); ++i) (edges[i].sign > 0 ? pos : neg).push_back(i);

  // An ordered pair carries a single sign, so flipping in place cannot collide.
  for (auto* group : {&pos, &neg}) {
    for (std::size_t pick : choose(group->size(), floor_count(p, group->size()), rng)) {
      auto& e = edges[(*group)[pick]];
      e.sign = -e.sign;
    }
  }
  return SignedDiGraph::from_edges(g.num_nodes(), edges);
}

SignedDiGraph perturb_directions(const SignedDiGraph& g, double r, Rng& rng) {
  check_ratio(r, "direction flip ratio r");
  std::vector<EdgeRecord> edges = g.edges();
  const auto selected = choose(edges.size(), floor_count(r, edges.size()), rng);

  std::unordered_map<std::uint64_t, std::size_t> position;
  position.reserve(edges.size());
  const auto key = [](Index u, Index v) {
    return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
  };
  for (std::size_t i = 0; i < edges.size(); ++i) position.emplace(key(edges[i].src, edges[i].dst), i);

  std::vector<char> removed(edges.size(), 0), handled(edges.size(), 0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i : selected) {
    if (handled[i]) continue;
    handled[i] = 1;
    auto& e = edges[i];
    const auto reverse = position.find(key(e.dst, e.src));
    if (reverse != position.end()) {
      // reciprocal pair in g: keep exactly one direction
      handled[reverse->second] = 1;
      removed[coin(rng) ? i : reverse->second] = 1;
    } else {
      std::swap(e.src, e.dst);
    }
  }

  std::vector<EdgeRecord> kept;
  kept.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!removed[i]) kept.push_back(edges[i]);
  }
  return SignedDiGraph::from_edges(g.num_nodes(), kept);
}

double sample_phase(const PerturbationConfig& config, Rng& rng) {
  if (config.q_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, config.q_noise_std);
    return std::clamp(config.q_base + noise(rng), 0.0, kHalfPi);
  }
  if (config.q_choices.empty()) throw InputError("q choices must not be empty");
  std::uniform_int_distribution<std::size_t> pick(0, config.q_choices.size() - 1);
  return config.q_choices[pick(rng)];
}

std::pair<GraphView, GraphView> make_views(const SignedDiGraph& g, const PerturbationConfig& config,
                                           Rng& rng) {
  const auto one_view = [&] {
    GraphView view;
    view.graph = perturb_directions(perturb_signs(g, config.sign_flip_ratio, rng),
                                    config.direction_flip_ratio, rng);
    view.q = sample_phase(config, rng);
    return view;
  };
  GraphView first = one_view();
  GraphView second = one_view();
  return {std::move(first), std::move(second)};
}

}  // namespace sdgcl
