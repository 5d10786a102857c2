#pragma once

#include <numbers>
#include <utility>
#include <vector>

#include "sdgcl/graph.hpp"

namespace sdgcl {

/// The default discrete phase grid {0, 0.1π, 0.2π, 0.3π, 0.4π}.
inline std::vector<double> default_q_grid() {
  constexpr double pi = std::numbers::pi;
  return {0.0, 0.1 * pi, 0.2 * pi, 0.3 * pi, 0.4 * pi};
}

struct PerturbationConfig {
  double sign_flip_ratio = 0.1;       // p
  double direction_flip_ratio = 0.1;  // r
  std::vector<double> q_choices = default_q_grid();
  double q_base = 0.1 * std::numbers::pi;
  double q_noise_std = 0.0;  // > 0 switches to Gaussian-noise mode around q_base
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range ratios or phases.
  void validate() const;

  /// Phase used when a view is built without perturbation (evaluation):
  /// median of q_choices in discrete mode, q_base in noise mode.
  double reference_q() const;
};

struct GraphView {
  SignedDiGraph graph;
  double q = 0.0;
};

/// Flips floor(p |E+|) positive and floor(p |E-|) negative edges, chosen uniformly.
SignedDiGraph perturb_signs(const SignedDiGraph& g, double p, Rng& rng);

/// Reverses floor(r |E|) uniformly chosen edges. An edge whose reverse exists in g is
/// reciprocal; for a selected reciprocal pair one direction is deleted at random.
SignedDiGraph perturb_directions(const SignedDiGraph& g, double r, Rng& rng);

double sample_phase(const PerturbationConfig& config, Rng& rng);

/// Two independently perturbed views, each with its own phase.
std::pair<GraphView, GraphView> make_views(const SignedDiGraph& g, const PerturbationConfig& config,
                                           Rng& rng);

}  // namespace sdgcl
