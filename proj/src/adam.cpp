#include <cmath>

#include "sdgcl/error.hpp"
#include "sdgcl/training.hpp"

namespace sdgcl {

AdamState AdamState::for_params(const EncoderParams& params) {
  return {EncoderParams::zeros(params.dims()), EncoderParams::zeros(params.dims()), 0};
}

void adam_step(EncoderParams& params, const EncoderParams& gradient, AdamState& state, double lr,
               double weight_decay, const AdamOptions& options) {
  auto p = params.slots();
  const auto g = gradient.slots();
  auto m = state.first_moment.slots();
  auto v = state.second_moment.slots();
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw InputError("Adam: tensor count mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k].values.size() != p[k].values.size() || m[k].values.size() != p[k].values.size() ||
        v[k].values.size() != p[k].values.size()) {
      throw InputError("Adam: shape mismatch in " + p[k].name);
    }
    Eigen::VectorXd grad = g[k].values;
    if (p[k].decayed && weight_decay > 0.0) grad += weight_decay * p[k].values;
    m[k].values = options.beta1 * m[k].values + (1.0 - options.beta1) * grad;
    v[k].values = options.beta2 * v[k].values + (1.0 - options.beta2) * grad.cwiseAbs2();
    p[k].values.array() -= lr * (m[k].values.array() / correction1) /
                           ((v[k].values.array() / correction2).sqrt() + options.epsilon);
  }
}

}  // namespace sdgcl
