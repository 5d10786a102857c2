#include <cmath>

#include "sdgcl/error.hpp"
#include "sdgcl/metrics.hpp"
#include "sdgcl/training.hpp"

namespace sdgcl {

FitResult fit(Index num_nodes, const DataSplit& split, const PerturbationConfig& perturbation,
              const TrainConfig& config, const ModelDims& dims,
              const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  perturbation.validate();
  ModelDims model_dims = dims;
  model_dims.num_nodes = num_nodes;

  // Independent streams: initialization, edge sampling, augmentation.
  Rng init_rng(config.seed);
  std::seed_seq sample_seed{config.seed, std::uint64_t{1}};
  Rng sample_rng(sample_seed);
  std::seed_seq augment_seed{config.seed, perturbation.seed, std::uint64_t{2}};
  Rng augment_rng(augment_seed);

  EncoderParams params = init_params(model_dims, init_rng);
  AdamState adam = AdamState::for_params(params);

  const SignedDiGraph train_graph = graph_from_edges(num_nodes, split.train);
  const HermitianMatrix eval_operator =
      renormalized_propagation(train_graph, PhaseSpec{perturbation.reference_q()});

  FitResult result;
  result.params = params;
  result.best_val_auc = -1.0;
  std::vector<EdgeRecord> sampled = sample_training_edges(split.train, config.sample_ratio, sample_rng());
  int since_best = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (!config.freeze_sampling && epoch > 1) {
      sampled = sample_training_edges(split.train, config.sample_ratio, sample_rng());
    }
    const auto [view1, view2] = make_views(train_graph, perturbation, augment_rng);
    const HermitianMatrix y1 = renormalized_propagation(view1.graph, PhaseSpec{view1.q});
    const HermitianMatrix y2 = renormalized_propagation(view2.graph, PhaseSpec{view2.q});

    const ForwardPass pass = run_forward(params, y1, y2, sampled, config);
    if (!std::isfinite(pass.losses.total)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + " (inter " +
                           std::to_string(pass.losses.inter) + ", intra " +
                           std::to_string(pass.losses.intra) + ", label " +
                           std::to_string(pass.losses.label) + ")");
    }
    const EncoderParams gradient = backward(pass, params);
    adam_step(params, gradient, adam, config.lr, config.weight_decay);
    if (!params.all_finite()) {
      throw NumericalError("non-finite parameters after epoch " + std::to_string(epoch));
    }

    const Eigen::MatrixXd fused = fused_representation(params, eval_operator);
    const Eigen::VectorXd scores = predict_edges(fused, split.valid, params);
    std::vector<int> labels;
    labels.reserve(split.valid.size());
    for (const auto& e : split.valid) labels.push_back(e.sign > 0 ? 1 : 0);
    const double val_auc =
        auc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), labels);

    EpochLog entry{epoch, pass.losses, val_auc, view1.q, view2.q};
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (val_auc > result.best_val_auc) {
      result.best_val_auc = val_auc;
      result.best_epoch = epoch;
      result.params = params;
      since_best = 0;
    } else if (++since_best > config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace sdgcl
