#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "sdgcl/encoder.hpp"

namespace sdgcl {

/// ROC-AUC with the positive sign as positive class; ties count one half.
/// labels: 1 positive, 0 negative. Throws InputError unless both classes occur.
double auc(std::span<const double> scores, std::span<const int> labels);

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const noexcept { return tp + fp + tn + fn; }
};

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
  double binary = 0.0;
};

/// score >= threshold predicts positive. An undefined per-class F1 counts as 0.
F1Scores f1_suite(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct MetricsReport {
  double auc = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double binary_f1 = 0.0;
  Confusion confusion;
  double threshold = 0.5;
};

MetricsReport metrics_report(std::span<const double> scores, std::span<const int> labels,
                             double threshold = 0.5);

/// R from a single unperturbed operator fed to both encoder branches.
Eigen::MatrixXd fused_representation(const EncoderParams& params, const HermitianMatrix& propagation);

/// Scores every edge with predict_edge on the unperturbed graph at phase q.
MetricsReport evaluate(const EncoderParams& params, const SignedDiGraph& operator_graph, double q,
                       std::span<const EdgeRecord> edges, double threshold = 0.5);

std::vector<int> sign_labels(std::span<const EdgeRecord> edges);

}  // namespace sdgcl
