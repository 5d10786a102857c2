#include <cmath>

#include "sdgcl/error.hpp"
#include "sdgcl/training.hpp"

namespace sdgcl {

namespace {

Eigen::MatrixXd positive_mask(const Eigen::MatrixXd& x) {
  return (x.array() > 0.0).cast<double>().matrix();
}

Eigen::VectorXd column_sums(const Eigen::MatrixXd& x) { return x.colwise().sum().transpose(); }

void append_pattern(std::vector<char>& out, const Eigen::MatrixXd& x) {
  for (Index i = 0; i < x.size(); ++i) out.push_back(x.data()[i] > 0.0 ? 1 : 0);
}

ViewCache forward_view(const EncoderParams& params, const HermitianMatrix& propagation,
                       bool use_projection) {
  ViewCache view;
  view.propagation = propagation;
  ComplexFeatures x{params.input_embeddings,
                    Eigen::MatrixXd::Zero(params.input_embeddings.rows(), params.input_embeddings.cols())};
  for (std::size_t l = 0; l < params.conv_weights.size(); ++l) {
    view.pre.push_back(conv_layer_preactivation(propagation, x, params.conv_weights[l],
                                                params.conv_bias_real[l], params.conv_bias_imag[l]));
    view.post.push_back(complex_relu(view.pre.back()));
    x = view.post.back();
  }
  view.unwound = unwind(x);
  view.z_pre = view.unwound * params.fc_weight;
  view.z_pre.rowwise() += params.fc_bias.transpose();
  view.z = relu(view.z_pre);
  if (use_projection) {
    view.proj_pre = view.z * params.proj_weight1;
    view.proj_pre.rowwise() += params.proj_bias1.transpose();
    view.m = relu(view.proj_pre) * params.proj_weight2;
    view.m.rowwise() += params.proj_bias2.transpose();
  } else {
    view.m = view.z;
  }
  return view;
}

void backward_view(const ViewCache& view, const EncoderParams& params, Eigen::MatrixXd grad_z,
                   const Eigen::MatrixXd& grad_m, bool use_projection, EncoderParams& grad) {
  if (use_projection) {
    const Eigen::MatrixXd hidden = relu(view.proj_pre);
    grad.proj_weight2.noalias() += hidden.transpose() * grad_m;
    grad.proj_bias2 += column_sums(grad_m);
    const Eigen::MatrixXd grad_pre =
        (grad_m * params.proj_weight2.transpose()).cwiseProduct(positive_mask(view.proj_pre));
    grad.proj_weight1.noalias() += view.z.transpose() * grad_pre;
    grad.proj_bias1 += column_sums(grad_pre);
    grad_z.noalias() += grad_pre * params.proj_weight1.transpose();
  } else {
    grad_z += grad_m;
  }

  const Eigen::MatrixXd grad_z_pre = grad_z.cwiseProduct(positive_mask(view.z_pre));
  grad.fc_weight.noalias() += view.unwound.transpose() * grad_z_pre;
  grad.fc_bias += column_sums(grad_z_pre);
  const Eigen::MatrixXd grad_unwound = grad_z_pre * params.fc_weight.transpose();

  const Index width = params.conv_weights.back().cols();
  ComplexFeatures grad_h{grad_unwound.leftCols(width), grad_unwound.rightCols(width)};
  const auto& yr = view.propagation.real_part();
  const auto& yi = view.propagation.imag_part();
  for (std::size_t l = params.conv_weights.size(); l-- > 0;) {
    const Eigen::MatrixXd mask = positive_mask(view.pre[l].real);
    const Eigen::MatrixXd grad_pr = grad_h.real.cwiseProduct(mask);
    const Eigen::MatrixXd grad_pi = grad_h.imag.cwiseProduct(mask);
    grad.conv_bias_real[l] += column_sums(grad_pr);
    grad.conv_bias_imag[l] += column_sums(grad_pi);

    // P = Y A + b with A = X W; adjoint of the complex product taken in real form.
    const Eigen::MatrixXd grad_ar = yr.transpose() * grad_pr + yi.transpose() * grad_pi;
    const Eigen::MatrixXd grad_ai = yr.transpose() * grad_pi - yi.transpose() * grad_pr;
    const auto& w = params.conv_weights[l];
    if (l == 0) {
      grad.conv_weights[l].noalias() += params.input_embeddings.transpose() * grad_ar;
      grad.input_embeddings.noalias() += grad_ar * w.transpose();
    } else {
      const auto& x = view.post[l - 1];
      grad.conv_weights[l].noalias() += x.real.transpose() * grad_ar + x.imag.transpose() * grad_ai;
      grad_h.real = grad_ar * w.transpose();
      grad_h.imag = grad_ai * w.transpose();
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(alpha >= 0.0)) throw InputError("alpha must be non-negative");
  if (!(tau > 0.0)) throw InputError("tau must be positive");
  if (!(lr > 0.0)) throw InputError("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw InputError("weight decay must be non-negative");
  if (max_epochs < 1) throw InputError("max epochs must be at least 1");
  if (patience < 0) throw InputError("patience must be non-negative");
  if (!(sample_ratio >= 0.0)) throw InputError("sample ratio must be non-negative");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("threshold must lie in [0, 1]");
}

std::vector<char> ForwardPass::activation_pattern() const {
  std::vector<char> out;
  for (const auto& view : views) {
    for (const auto& pre : view.pre) append_pattern(out, pre.real);
    append_pattern(out, view.z_pre);
    if (view.proj_pre.size() > 0) append_pattern(out, view.proj_pre);
  }
  append_pattern(out, fused_pre);
  for (Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities(i);
    out.push_back(p < kProbabilityClamp ? 0 : (p > 1.0 - kProbabilityClamp ? 2 : 1));
  }
  return out;
}

ForwardPass run_forward(const EncoderParams& params, const HermitianMatrix& propagation1,
                        const HermitianMatrix& propagation2, std::span<const EdgeRecord> edges,
                        const TrainConfig& config, bool need_gradients) {
  if (edges.empty()) throw InputError("forward pass needs at least one labelled edge");
  ForwardPass out;
  out.alpha = config.alpha;
  out.use_projection = config.use_projection;
  out.edges.assign(edges.begin(), edges.end());
  out.views[0] = forward_view(params, propagation1, config.use_projection);
  out.views[1] = forward_view(params, propagation2, config.use_projection);

  const Index d = params.fc_bias.size();
  out.fused_pre = out.views[0].z * params.fusion_weight.topRows(d) +
                  out.views[1].z * params.fusion_weight.bottomRows(d);
  out.fused_pre.rowwise() += params.fusion_bias.transpose();
  out.fused = relu(out.fused_pre);
  out.probabilities = predict_edges(out.fused, edges, params);

  std::vector<int> labels(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) labels[i] = edges[i].sign > 0 ? 1 : 0;
  const double label = label_loss(
      std::span<const double>(out.probabilities.data(), static_cast<std::size_t>(out.probabilities.size())),
      labels);

  const auto& m1 = out.views[0].m;
  const auto& m2 = out.views[1].m;
  double inter = 0.0, intra = 0.0;
  out.has_gradients = need_gradients && config.alpha > 0.0;
  if (out.has_gradients) {
    out.inter = inter_view_loss_grad(m1, m2, config.tau, config.symmetric_inter_loss);
    out.intra[0] = intra_view_loss_grad(m1, config.tau);
    out.intra[1] = intra_view_loss_grad(m2, config.tau);
    inter = out.inter.value;
    intra = 0.5 * (out.intra[0].value + out.intra[1].value);
  } else {
    inter = inter_view_loss(m1, m2, config.tau, config.symmetric_inter_loss);
    intra = 0.5 * (intra_view_loss(m1, config.tau) + intra_view_loss(m2, config.tau));
  }
  out.losses = total_loss(inter, intra, label, config.alpha);
  return out;
}

EncoderParams backward(const ForwardPass& forward, const EncoderParams& params) {
  if (forward.empty() || forward.fused.size() == 0) {
    throw InputError("backward called without a completed forward pass");
  }
  if (forward.alpha > 0.0 && !forward.has_gradients) {
    throw InputError("forward pass was run without contrastive gradients");
  }
  EncoderParams grad = EncoderParams::zeros(params.dims());
  const Index d = params.fc_bias.size();
  const auto w_src = params.pred_weight.head(d);
  const auto w_dst = params.pred_weight.tail(d);

  Eigen::MatrixXd grad_fused = Eigen::MatrixXd::Zero(forward.fused.rows(), d);
  for (std::size_t i = 0; i < forward.edges.size(); ++i) {
    const auto& e = forward.edges[i];
    const double p = forward.probabilities(static_cast<Index>(i));
    if (p < kProbabilityClamp || p > 1.0 - kProbabilityClamp) continue;  // clamped: flat
    const double g = e.sign > 0 ? p - 1.0 : p;  // d BCE / d logit
    grad.pred_weight.head(d) += g * forward.fused.row(e.src).transpose();
    grad.pred_weight.tail(d) += g * forward.fused.row(e.dst).transpose();
    grad.pred_bias(0) += g;
    grad_fused.row(e.src) += g * w_src.transpose();
    grad_fused.row(e.dst) += g * w_dst.transpose();
  }

  const Eigen::MatrixXd grad_fused_pre = grad_fused.cwiseProduct(positive_mask(forward.fused_pre));
  grad.fusion_weight.topRows(d).noalias() += forward.views[0].z.transpose() * grad_fused_pre;
  grad.fusion_weight.bottomRows(d).noalias() += forward.views[1].z.transpose() * grad_fused_pre;
  grad.fusion_bias += column_sums(grad_fused_pre);

  for (int k = 0; k < 2; ++k) {
    const auto& view = forward.views[k];
    Eigen::MatrixXd grad_z =
        grad_fused_pre * (k == 0 ? params.fusion_weight.topRows(d) : params.fusion_weight.bottomRows(d))
                             .transpose();
    Eigen::MatrixXd grad_m = Eigen::MatrixXd::Zero(view.m.rows(), view.m.cols());
    if (forward.has_gradients) {
      const auto& inter_grad = k == 0 ? forward.inter.grad_first : forward.inter.grad_second;
      grad_m = forward.alpha * (inter_grad + 0.5 * forward.intra[k].grad_first);
    }
    backward_view(view, params, std::move(grad_z), grad_m, forward.use_projection, grad);
  }
  return grad;
}

FiniteDiffProbe probe_coordinate(const EncoderParams& params, const EncoderParams& gradient,
                                 const HermitianMatrix& propagation1,
                                 const HermitianMatrix& propagation2,
                                 std::span<const EdgeRecord> edges, const TrainConfig& config,
                                 std::size_t slot, Index index, double step,
                                 double denominator_floor) {
  const auto base_pattern =
      run_forward(params, propagation1, propagation2, edges, config, false).activation_pattern();
  const auto evaluate = [&](double delta, bool& same_pattern) {
    EncoderParams shifted = params;
    shifted.slots()[slot].values(index) += delta;
    const auto pass = run_forward(shifted, propagation1, propagation2, edges, config, false);
    same_pattern = same_pattern && pass.activation_pattern() == base_pattern;
    return pass.losses.total;
  };

  FiniteDiffProbe probe;
  const auto grad_slots = gradient.slots();
  probe.slot = grad_slots.at(slot).name;
  probe.index = index;
  probe.analytic = grad_slots[slot].values(index);
  bool smooth = true;
  const double up = evaluate(step, smooth);
  const double down = evaluate(-step, smooth);
  probe.numeric = (up - down) / (2.0 * step);
  probe.smooth = smooth;
  const double scale = std::max({std::abs(probe.analytic), std::abs(probe.numeric), denominator_floor});
  probe.relative_error = std::abs(probe.analytic - probe.numeric) / scale;
  return probe;
}

FiniteDiffReport finite_diff_check(const EncoderParams& params, const HermitianMatrix& propagation1,
                                   const HermitianMatrix& propagation2,
                                   std::span<const EdgeRecord> edges, const TrainConfig& config,
                                   std::size_t probes, Rng& rng, double step,
                                   double denominator_floor) {
  const auto pass = run_forward(params, propagation1, propagation2, edges, config, true);
  const EncoderParams gradient = backward(pass, params);

  const auto slots = params.slots();
  std::vector<Index> offsets{0};
  for (const auto& s : slots) offsets.push_back(offsets.back() + s.values.size());
  std::uniform_int_distribution<Index> pick(0, offsets.back() - 1);

  FiniteDiffReport report;
  const std::size_t max_attempts = 20 * probes + 100;
  for (std::size_t attempt = 0; report.probes < probes && attempt < max_attempts; ++attempt) {
    const Index flat = pick(rng);
    const auto slot = static_cast<std::size_t>(
        std::upper_bound(offsets.begin(), offsets.end(), flat) - offsets.begin() - 1);
    const auto probe = probe_coordinate(params, gradient, propagation1, propagation2, edges, config,
                                        slot, flat - offsets[slot], step, denominator_floor);
    if (!probe.smooth) {
      ++report.redrawn;
      continue;
    }
    ++report.probes;
    if (probe.relative_error >= report.max_relative_error) {
      report.max_relative_error = probe.relative_error;
      report.worst = probe;
    }
  }
  return report;
}

}  // namespace sdgcl
