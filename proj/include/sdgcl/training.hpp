#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdgcl/augment.hpp"
#include "sdgcl/encoder.hpp"
#include "sdgcl/losses.hpp"

namespace sdgcl {

struct TrainConfig {
  double alpha = 0.2;  // contrastive weight
  double tau = 0.5;    // temperature
  double lr = 1e-3;
  double weight_decay = 1e-3;
  int max_epochs = 300;
  int patience = 30;  // epochs without validation-AUC improvement before stopping
  std::uint64_t seed = 0;
  bool symmetric_inter_loss = false;
  bool use_projection = true;   // false: contrastive losses act on Z directly
  double sample_ratio = 3.0;    // positive:negative training edges per epoch
  bool freeze_sampling = false;  // draw the training edge sample once instead of per epoch
  double threshold = 0.5;

  void validate() const;
};

/// Cached intermediates of one forward pass of the full objective.
struct ViewCache {
  HermitianMatrix propagation;
  std::vector<ComplexFeatures> pre;   // per layer, before complex ReLU
  std::vector<ComplexFeatures> post;  // per layer, after complex ReLU
  Eigen::MatrixXd unwound;
  Eigen::MatrixXd z_pre;
  Eigen::MatrixXd z;
  Eigen::MatrixXd proj_pre;  // empty without projection head
  Eigen::MatrixXd m;
};

struct ForwardPass {
  ViewCache views[2];
  Eigen::MatrixXd fused_pre;
  Eigen::MatrixXd fused;
  std::vector<EdgeRecord> edges;
  Eigen::VectorXd probabilities;
  LossBreakdown losses;
  LossValueGrad inter;
  LossValueGrad intra[2];
  double alpha = 0.0;
  bool use_projection = true;
  bool has_gradients = false;

  bool empty() const noexcept { return edges.empty(); }
  /// One byte per ReLU unit and probability clamp; equal patterns mean the loss is
  /// smooth along the segment between two parameter points.
  std::vector<char> activation_pattern() const;
};

/// Both views through the shared encoder, projection, fusion, prediction and all losses.
ForwardPass run_forward(const EncoderParams& params, const HermitianMatrix& propagation1,
                        const HermitianMatrix& propagation2, std::span<const EdgeRecord> edges,
                        const TrainConfig& config, bool need_gradients = true);

/// Reverse-mode gradient of forward.losses.total with respect to every parameter.
EncoderParams backward(const ForwardPass& forward, const EncoderParams& params);

struct FiniteDiffProbe {
  std::string slot;
  Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
  bool smooth = true;  // activation pattern unchanged at theta +/- h
};

FiniteDiffProbe probe_coordinate(const EncoderParams& params, const EncoderParams& gradient,
                                 const HermitianMatrix& propagation1,
                                 const HermitianMatrix& propagation2,
                                 std::span<const EdgeRecord> edges, const TrainConfig& config,
                                 std::size_t slot, Index index, double step = 1e-5,
                                 double denominator_floor = 1e-6);

struct FiniteDiffReport {
  double max_relative_error = 0.0;
  std::size_t probes = 0;
  std::size_t redrawn = 0;  // coordinates rejected because ±h crossed a kink
  FiniteDiffProbe worst;
};

/// Central differences on `probes` uniformly drawn coordinates against backward().
FiniteDiffReport finite_diff_check(const EncoderParams& params, const HermitianMatrix& propagation1,
                                   const HermitianMatrix& propagation2,
                                   std::span<const EdgeRecord> edges, const TrainConfig& config,
                                   std::size_t probes, Rng& rng, double step = 1e-5,
                                   double denominator_floor = 1e-6);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  EncoderParams first_moment;
  EncoderParams second_moment;
  std::int64_t step = 0;

  static AdamState for_params(const EncoderParams& params);
};

/// Adam with L2 weight decay folded into the gradient (grad += decay * param) on
/// weight tensors and input embeddings.
void adam_step(EncoderParams& params, const EncoderParams& gradient, AdamState& state, double lr,
               double weight_decay, const AdamOptions& options = {});

struct EpochLog {
  int epoch = 0;
  LossBreakdown loss;
  double val_auc = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
};

struct FitResult {
  EncoderParams params;  // best validation AUC
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_auc = 0.0;
};

/// Joint contrastive + label training with per-epoch re-augmentation and early stopping
/// on validation AUC. The operators are built from training edges only.
FitResult fit(Index num_nodes, const DataSplit& split, const PerturbationConfig& perturbation,
              const TrainConfig& config, const ModelDims& dims,
              const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace sdgcl
