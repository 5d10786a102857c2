#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdgcl/augment.hpp"
#include "sdgcl/metrics.hpp"
#include "sdgcl/training.hpp"

namespace sdgcl {

/// Everything one training run needs; serialized as the run's config snapshot.
struct RunConfig {
  std::filesystem::path dataset;
  EdgeListFormat format = EdgeListFormat::SnapRating;
  std::uint64_t split_seed = 0;  // used only when `dataset` is a raw edge list
  PerturbationConfig perturbation;
  TrainConfig train;
  ModelDims dims;
  int seeds = 1;

  void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
RunConfig apply_config_json(RunConfig base, const nlohmann::json& j);

/// A prepared directory (with split.json) is read as is; a raw edge list is loaded
/// and split with `split_seed`.
PreparedData load_dataset(const std::filesystem::path& path, EdgeListFormat format,
                          std::uint64_t split_seed);

PreparedData prepare_dataset(const std::filesystem::path& raw, EdgeListFormat format,
                             std::uint64_t split_seed);

struct RunResult {
  FitResult fit;
  MetricsReport valid;
  MetricsReport test;
};

/// Trains with config.train.seed and evaluates the best-validation parameters.
RunResult train_once(const PreparedData& data, const RunConfig& config);

/// Evaluation on the unperturbed training-edge operator at the configured reference phase.
MetricsReport evaluate_split(const EncoderParams& params, const PreparedData& data,
                             const PerturbationConfig& perturbation,
                             const std::vector<EdgeRecord>& edges, double threshold);

/// {auc, macro_f1, micro_f1, binary_f1, tp, fp, tn, fn, threshold, seed}
nlohmann::ordered_json metrics_json(const MetricsReport& report, std::uint64_t seed);
nlohmann::ordered_json epoch_json(const EpochLog& entry);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(const std::vector<double>& values);

/// Per-metric mean/std over runs.
nlohmann::ordered_json summarize(const std::vector<MetricsReport>& reports);

enum class Variant { Full, NoStructureAug, NoLaplacianAug, NoAugmentation, NoContrastive, NoProjection };

inline constexpr Variant kAllVariants[] = {Variant::Full,           Variant::NoStructureAug,
                                           Variant::NoLaplacianAug, Variant::NoAugmentation,
                                           Variant::NoContrastive,  Variant::NoProjection};

std::string variant_name(Variant variant);
RunConfig apply_variant(RunConfig config, Variant variant);

/// Sweep parameters: "p", "r", "pr" (both ratios; Laplacian perturbation off) and
/// "q_noise_std" (Gaussian phase noise around q_base; structure perturbation off).
RunConfig apply_sweep_point(RunConfig config, const std::string& parameter, double value);

}  // namespace sdgcl
